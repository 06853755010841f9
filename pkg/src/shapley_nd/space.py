"""Vectorized exhaustive evaluation over the full profile space.

Costs are rescaled to integers: every edge cost ``a + b*eps`` is multiplied by
``scale`` (a common denominator times lcm(1..k)) so that each share
``c_e / l`` and each harmonic term ``c_e / j`` is an integer. The pair
``(A, B)`` is then packed as ``A * W + B`` with ``W`` larger than twice any
eps-coefficient that can arise, so integer order equals lexicographic order.
Values that might not fit into int64 switch the arrays to object dtype.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ExplosionError
from .exact import EpsCost
from .game import DEFAULT_PATH_CAP, Game, Path, StrategyProfile, enumerate_simple_paths

DEFAULT_PROFILE_BUDGET = 10**8
CHUNK = 1 << 15
_INT64_SAFE = 1 << 62


def _lcm_range(k: int) -> int:
    out = 1
    for j in range(2, k + 1):
        out = math.lcm(out, j)
    return out


@dataclass
class Encoding:
    scale: int
    width: int
    dtype: object

    def decode(self, x) -> EpsCost:
        x = int(x)
        w = self.width
        a = (x + w // 2) // w
        b = x - a * w
        return EpsCost(Fraction(a, self.scale), Fraction(b, self.scale))


def make_encoding(costs: Sequence[EpsCost], k: int) -> tuple[Encoding, list[int]]:
    den = 1
    for c in costs:
        den = math.lcm(den, c.a.denominator, c.b.denominator)
    scale = den * _lcm_range(max(k, 1))
    A = [int(c.a * scale) for c in costs]
    B = [int(c.b * scale) for c in costs]
    kk = max(k, 1)
    width = 2 * kk * sum(abs(b) for b in B) + 1
    enc = [a * width + b for a, b in zip(A, B)]
    bound = (kk * sum(abs(a) for a in A) + 1) * width * 2
    dtype = np.int64 if bound < _INT64_SAFE else object
    return Encoding(scale, width, dtype), enc


class ProfileSpace:
    """All strategy profiles of a fixed topology, evaluated for given costs.

    Path enumeration depends only on the topology, so a single space can be
    re-evaluated cheaply for many cost vectors (used by the cost search).
    """

    def __init__(self, game: Game, cap: int = DEFAULT_PATH_CAP, budget: int = DEFAULT_PROFILE_BUDGET):
        self.game = game
        self.k = game.k
        self.m = game.m
        self.paths: list[list[Path]] = [enumerate_simple_paths(game, i, cap) for i in range(game.k)]
        self.shape = tuple(len(p) for p in self.paths)
        self.size = math.prod(self.shape)
        if self.size > budget:
            raise ExplosionError("strategy profiles", budget, self.size)
        self.incidence = []
        for plist in self.paths:
            inc = np.zeros((len(plist), self.m), dtype=np.int64)
            for r, p in enumerate(plist):
                inc[r, list(p.edges)] = 1
            self.incidence.append(inc)

    def profile(self, index: int) -> StrategyProfile:
        idx = np.unravel_index(index, self.shape)
        return StrategyProfile(tuple(self.paths[i][int(j)] for i, j in enumerate(idx)))

    def indices(self, index: int) -> tuple[int, ...]:
        return tuple(int(j) for j in np.unravel_index(index, self.shape))

    def evaluate(self, costs: Sequence[EpsCost] | None = None, ranges=None, margins: bool = False) -> "Evaluation":
        """Exhaustively classify every profile.

        ``ranges`` optionally restricts to a list of ``(start, stop)`` index
        ranges; results are merged in index order either way. With
        ``margins`` the per-player gaps (cheapest other path minus own cost,
        encoded units) are kept as a (profiles, k) array; a profile is a Nash
        equilibrium exactly when its row minimum is >= 0.
        """
        if costs is None:
            costs = [e.cost for e in self.game.edges]
        enc, cvals = make_encoding(costs, self.k)
        dt = enc.dtype
        k, m = self.k, self.m
        cvec = np.array(cvals, dtype=dt)
        # share[e, l] = c_e / l ; harm[e, l] = H_l * c_e ; column 0 is zero.
        share = np.zeros((m, k + 2), dtype=dt)
        harm = np.zeros((m, k + 2), dtype=dt)
        for e, c in enumerate(cvals):
            acc = 0
            for l in range(1, k + 2):
                q = c // l if l <= k else 0
                share[e, l] = q
                if l <= k:
                    acc += q
                    harm[e, l] = acc
        cols = np.arange(m)
        # stands in for "no alternative path"; exceeds any real path cost
        lone = sum(abs(c) for c in cvals) + 1
        if ranges is None:
            ranges = [(0, self.size)]

        nash: list[int] = []
        opt_val = pot_val = None
        opt_idx: list[int] = []
        pot_idx: list[int] = []
        nash_cost_min = nash_cost_max = None
        margin_parts = []
        for start, stop in ranges:
            for lo in range(start, stop, CHUNK):
                hi = min(stop, lo + CHUNK)
                flat = np.arange(lo, hi)
                idx = np.unravel_index(flat, self.shape) if k else ()
                rows = [self.incidence[i][idx[i]] for i in range(k)]
                load = np.zeros((hi - lo, m), dtype=np.int64)
                for r in rows:
                    load += r
                social = (load > 0).astype(dt) @ cvec if m else np.zeros(hi - lo, dtype=dt)
                phi = harm[cols, load].sum(axis=1) if m else np.zeros(hi - lo, dtype=dt)
                gaps = np.zeros((hi - lo, k), dtype=dt)
                for i in range(k):
                    resid = load - rows[i]
                    w = share[cols, resid + 1]
                    alt = w @ self.incidence[i].T
                    at = np.arange(hi - lo)
                    own = alt[at, idx[i]].copy()
                    alt[at, idx[i]] = lone
                    gaps[:, i] = alt.min(axis=1) - own
                ok = gaps.min(axis=1) >= 0 if k else np.ones(hi - lo, dtype=bool)
                if margins:
                    margin_parts.append(gaps)
                nash.extend((flat[ok]).tolist())
                opt_val, opt_idx = _merge_min(opt_val, opt_idx, social, flat)
                pot_val, pot_idx = _merge_min(pot_val, pot_idx, phi, flat)
                if ok.any():
                    sel = social[ok]
                    lo_c, hi_c = sel.min(), sel.max()
                    nash_cost_min = lo_c if nash_cost_min is None else min(nash_cost_min, lo_c)
                    nash_cost_max = hi_c if nash_cost_max is None else max(nash_cost_max, hi_c)
        return Evaluation(
            space=self,
            encoding=enc,
            costs=list(costs),
            nash=nash,
            optima=opt_idx,
            optimum_value=enc.decode(opt_val),
            potential_minima=pot_idx,
            potential_min_value=enc.decode(pot_val),
            nash_cost_min=enc.decode(nash_cost_min) if nash_cost_min is not None else None,
            nash_cost_max=enc.decode(nash_cost_max) if nash_cost_max is not None else None,
            margins=np.concatenate(margin_parts) if margins else None,
        )


def _merge_min(best, best_idx, values, flat):
    cur = values.min()
    if best is None or cur < best:
        return cur, flat[values == cur].tolist()
    if cur == best:
        return best, best_idx + flat[values == cur].tolist()
    return best, best_idx


@dataclass
class Evaluation:
    space: ProfileSpace
    encoding: Encoding
    costs: list
    nash: list[int]
    optima: list[int]
    optimum_value: EpsCost
    potential_minima: list[int]
    potential_min_value: EpsCost
    nash_cost_min: EpsCost | None
    nash_cost_max: EpsCost | None
    margins: np.ndarray | None = None
