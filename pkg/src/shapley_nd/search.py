"""Seeded hill climbing with restarts over integer edge costs."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetError, InputError
from .exact import EpsCost, Ratio
from .game import DEFAULT_PATH_CAP, Game, require_valid
from .instances import load_game, serialize_instance
from .space import DEFAULT_PROFILE_BUDGET, ProfileSpace

OBJECTIVES = ("maximize-pos", "maximize-popos", "match-targets")
TARGET_NAMES = ("pos", "poa", "popos", "popoa", "opt_cost", "nash_cost")


@dataclass
class SearchSpec:
    base: Game
    slots: dict[int, tuple[int, int]]
    objective: str = "maximize-pos"
    targets: dict[str, Fraction] = field(default_factory=dict)
    require_unique_nash: bool = False
    # edge lists of the profile that must be the unique equilibrium (optional)
    target_nash: list | None = None
    # groups of slot ids whose total cost stays at its starting value
    fixed_sums: list | None = None
    budget: int = 1000
    seed: int = 0
    patience: int = 200
    cap: int = DEFAULT_PATH_CAP
    profile_budget: int = DEFAULT_PROFILE_BUDGET

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise InputError(f"unknown objective {self.objective!r}")
        if self.objective == "match-targets" and not self.targets:
            raise InputError("match-targets needs at least one target")
        for name in self.targets:
            if name not in TARGET_NAMES:
                raise InputError(f"unknown target {name!r}")
        for eid, (lo, hi) in self.slots.items():
            if not 0 <= eid < self.base.m:
                raise InputError(f"slot {eid} is not an edge id")
            if lo > hi:
                raise InputError(f"slot {eid} has empty range {lo}..{hi}")
        if self.budget < 1:
            raise InputError("budget must be at least 1")
        seen: set[int] = set()
        for group in self.fixed_sums or ():
            if len(group) < 2 or any(e not in self.slots or e in seen for e in group):
                raise InputError(f"fixed-sum group {group} must hold two or more distinct slots")
            seen.update(group)


@dataclass
class Measured:
    costs: tuple
    nash_count: int
    pos: Ratio
    poa: Ratio
    popos: Ratio
    popoa: Ratio
    opt_cost: EpsCost
    nash_cost: EpsCost
    # zero iff the equilibrium is unique (and is the target profile, if any)
    uniqueness_penalty: Fraction = Fraction(0)
    # same idea with a safety margin of one cost unit; breaks ties on plateaus
    robustness_penalty: Fraction = Fraction(0)

    def value(self, name: str) -> Fraction:
        if name in ("opt_cost", "nash_cost"):
            return getattr(self, name).a
        return getattr(self, name).limit


@dataclass
class SearchResult:
    game: Game
    measured: Measured
    score: tuple
    evaluations: int
    trace: list
    matched: bool


def profile_index(space: ProfileSpace, edge_lists) -> int:
    import numpy as np

    idx = []
    for i, el in enumerate(edge_lists):
        key = tuple(el)
        matches = [r for r, p in enumerate(space.paths[i]) if p.edges == key or p.edges == key[::-1]]
        if not matches:
            raise InputError(f"player {i} has no path {list(el)}")
        idx.append(matches[0])
    return int(np.ravel_multi_index(idx, space.shape))


def uniqueness_penalty(ev, target: int | None) -> Fraction:
    """Continuous distance from "exactly one equilibrium".

    An equilibrium whose smallest player gap is g >= 0 (encoded units) would
    need that gap pushed to -1 to break, so it contributes g + 1. Without a
    target the most stable equilibrium is exempt; with one, every player who
    would leave the target adds the size of the gain.
    """
    gaps = ev.margins
    unit = ev.encoding.scale * ev.encoding.width
    slack = [int(gaps[x].min()) + 1 for x in ev.nash if x != target]
    if target is None:
        slack = sorted(slack)[:-1]
    total = sum(slack) - sum(min(int(g), 0) for g in gaps[target]) if target is not None else sum(slack)
    return Fraction(total, unit)


def robustness_penalty(ev, target: int) -> Fraction:
    """Hinge loss asking every other profile to be broken, and every player
    at the target to be held, by at least one unit of cost."""
    import numpy as np

    unit = ev.encoding.scale * ev.encoding.width
    slack = ev.margins.min(axis=1) + unit
    slack[target] = 0
    total = int(np.maximum(slack, 0).sum())
    total += sum(max(0, unit - int(g)) for g in ev.margins[target])
    return Fraction(total, unit)


def measure(space: ProfileSpace, costs, target: int | None = None) -> Measured | None:
    """Exact ratios for one cost vector; None if the optimum has no constant
    term (ratios have no eps -> 0 limit)."""
    ev = space.evaluate(costs, margins=True)
    opt = ev.optimum_value
    if opt.a == 0:
        return None
    game = space.game
    pm = []
    for x in ev.potential_minima:
        used = {e for p in space.profile(x).paths for e in p.edges}
        pm.append(sum((costs[e] for e in sorted(used)), EpsCost.zero()))
    return Measured(
        costs=tuple(costs),
        nash_count=len(ev.nash),
        pos=Ratio(ev.nash_cost_min, opt),
        poa=Ratio(ev.nash_cost_max, opt),
        popos=Ratio(min(pm), opt),
        popoa=Ratio(max(pm), opt),
        opt_cost=opt,
        nash_cost=ev.nash_cost_min,
        uniqueness_penalty=uniqueness_penalty(ev, target),
        robustness_penalty=robustness_penalty(ev, target) if target is not None else Fraction(0),
    )


def score(spec: SearchSpec, m: Measured | None) -> tuple:
    """Larger is better; compared lexicographically."""
    if m is None:
        return (Fraction(-(10**12)), Fraction(-(10**12)), 0)
    tier = -m.uniqueness_penalty if spec.require_unique_nash else Fraction(0)
    if spec.objective == "maximize-pos":
        return (tier, m.pos.limit, m.pos.direction)
    if spec.objective == "maximize-popos":
        return (tier, m.popos.limit, m.popos.direction)
    miss = _miss(spec, m)
    return (tier - miss, -m.robustness_penalty, 0)


def _miss(spec: SearchSpec, m: Measured) -> Fraction:
    return sum((abs(m.value(n) - t) for n, t in sorted(spec.targets.items())), Fraction(0))


def climb_key(spec: SearchSpec, m: Measured | None, s: tuple) -> tuple:
    """What the hill climber follows. Matching a target equilibrium climbs
    the margin hinge, whose plateaus are far smaller than those of the exact
    score; everything else climbs the score itself."""
    if m is None or spec.objective != "match-targets" or spec.target_nash is None:
        return s
    return (-(_miss(spec, m) + m.robustness_penalty), s[0])


def _clamp(x, lo, hi):
    return max(lo, min(hi, x))


def _neighbor(rng: random.Random, x: dict, slots: dict, group_of: dict) -> dict:
    if rng.random() < 0.25:
        # a few simultaneous unit steps; reaches diagonal neighbors
        y = x
        for _ in range(rng.randint(2, 3)):
            y = _step(rng, y, slots, group_of, unit=True)
        return y
    return _step(rng, x, slots, group_of)


def _step(rng: random.Random, x: dict, slots: dict, group_of: dict, unit: bool = False) -> dict:
    y = dict(x)
    ids = sorted(slots)
    move = rng.randrange(2) if unit else rng.randrange(7)
    e = rng.choice(ids)
    lo, hi = slots[e]
    if e in group_of:
        move = 5 if unit else 5 + move % 2
        f = rng.choice([g for g in group_of[e] if g != e])
    else:
        f = rng.choice([g for g in ids if g not in group_of] or [e])
    if move == 0:
        y[e] = _clamp(x[e] + 1, lo, hi)
    elif move == 1:
        y[e] = _clamp(x[e] - 1, lo, hi)
    elif move == 2:
        y[e] = _clamp(x[e] * 2, lo, hi)
    elif move == 3:
        y[e] = _clamp(x[e] // 2, lo, hi)
    elif move == 4:
        y[e] = _clamp(x[e] + max(1, x[e] // 10) * rng.choice((-1, 1)), lo, hi)
    else:
        # shift weight between two slots, keeping their sum
        if unit:
            d = 1
        else:
            d = rng.choice((1, 1, 2, 5, 10, 25)) if move == 5 else max(1, x[e] // 20)
        if rng.random() < 0.5:
            e, f = f, e
        if f != e and slots[e][0] <= x[e] - d and x[f] + d <= slots[f][1]:
            y[e] = x[e] - d
            y[f] = x[f] + d
        elif e not in group_of:
            y[e] = _clamp(x[e] + rng.choice((-d, d)), *slots[e])
    return y


def _random_split(rng: random.Random, total: int, bounds: list) -> list | None:
    """Uniform-ish integer vector with the given total inside per-slot bounds."""
    for _ in range(100):
        w = [rng.random() for _ in bounds]
        scale = total / sum(w)
        v = [int(x * scale) for x in w]
        for j in range(total - sum(v)):
            v[j % len(v)] += 1
        if all(lo <= a <= hi for a, (lo, hi) in zip(v, bounds)):
            return v
    return None


def search_costs(spec: SearchSpec, space: ProfileSpace | None = None) -> SearchResult:
    """Hill climbing (sideways moves accepted) with restarts after ``patience``
    evaluations without improvement. Deterministic in (spec, seed)."""
    require_valid(spec.base)
    if space is None:
        space = ProfileSpace(spec.base, spec.cap, spec.profile_budget)
    rng = random.Random(spec.seed)
    base_costs = [e.cost for e in spec.base.edges]
    slots = {e: spec.slots[e] for e in sorted(spec.slots)}
    groups = [sorted(g) for g in spec.fixed_sums or ()]
    group_of = {e: g for g in groups for e in g}

    def costs_of(x):
        cs = list(base_costs)
        for e, v in x.items():
            cs[e] = EpsCost(Fraction(v), base_costs[e].b)
        return cs

    def feasible(x):
        return all(c.is_positive() for c in costs_of(x))

    cache: dict = {}
    evals = 0
    target = profile_index(space, spec.target_nash) if spec.target_nash is not None else None

    def evaluate(x):
        nonlocal evals
        key = tuple(x[e] for e in slots)
        if key not in cache:
            evals += 1
            m = measure(space, costs_of(x), target)
            sc = score(spec, m)
            cache[key] = (sc, climb_key(spec, m, sc), m)
        return cache[key]

    start = {e: _clamp(int(base_costs[e].a), *slots[e]) for e in slots}
    totals = [sum(start[e] for e in g) for g in groups]

    def random_point():
        for _ in range(1000):
            x = {e: rng.randint(lo, hi) for e, (lo, hi) in slots.items()}
            for g, total in zip(groups, totals):
                v = _random_split(rng, total, [slots[e] for e in g])
                if v is None:
                    break
                x.update(zip(g, v))
            else:
                if feasible(x):
                    return x
        raise BudgetError("no feasible cost assignment found")

    if not feasible(start):
        start = random_point()
    cur = start
    cur_score, cur_key, cur_m = evaluate(cur)
    best, best_score, best_m = cur, cur_score, cur_m
    peak, peak_key = cur, cur_key
    trace = [(evals, _score_json(cur_score))]
    stale = 0
    restarts = 0
    perfect = spec.objective == "match-targets"
    steps = 0
    while evals < spec.budget and steps < 50 * spec.budget:
        steps += 1
        if perfect and best_score[0] == 0:
            break
        if stale >= spec.patience:
            # alternate between a kick from the highest point and a fresh start
            restarts += 1
            if restarts % 2:
                cur = peak
                for _ in range(rng.randint(2, 6)):
                    cur = _neighbor(rng, cur, slots, group_of)
                if not feasible(cur):
                    cur = peak
            else:
                cur = random_point()
            cur_score, cur_key, cur_m = evaluate(cur)
            stale = 0
        else:
            cand = _neighbor(rng, cur, slots, group_of)
            if cand == cur or not feasible(cand):
                continue
            sc, key, m = evaluate(cand)
            if key >= cur_key:
                stale = 0 if key > cur_key else stale + 1
                cur, cur_score, cur_key, cur_m = cand, sc, key, m
            else:
                stale += 1
        if cur_key > peak_key:
            peak, peak_key = cur, cur_key
        if cur_score > best_score:
            best, best_score, best_m = cur, cur_score, cur_m
            trace.append((evals, _score_json(best_score)))
    game = spec.base.with_costs(costs_of(best))
    matched = perfect and best_score[0] == 0
    return SearchResult(game, best_m, best_score, evals, trace, matched)


def _score_json(s):
    return [str(s[0]), str(s[1]), s[2]]


def spec_from_json(text: str, base_dir=None) -> SearchSpec:
    """Parse a JSON search spec::

        {"instance": "<instance text>" | "instance_file": "path",
         "slots": {"<edge id>": [lo, hi], ...} | "all": [lo, hi],
         "objective": "maximize-pos" | "maximize-popos" | "match-targets",
         "targets": {"pos": "1769/1126", ...},
         "require_unique_nash": false, "target_nash": [[edge ids], ...],
         "fixed_sums": [[slot ids], ...], "budget": 1000, "seed": 0, "patience": 200}
    """
    from pathlib import Path

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"search spec is not valid JSON: {exc}") from None
    if "instance" in raw:
        inst = raw["instance"]
    elif "instance_file" in raw:
        p = Path(raw["instance_file"])
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        inst = p.read_text(encoding="utf-8")
    else:
        raise InputError("search spec needs 'instance' or 'instance_file'")
    base = load_game(inst)
    slots_raw = raw.get("slots", "all")
    if slots_raw == "all" or "all" in raw:
        lo, hi = raw.get("all", [1, 1000])
        slots = {e: (int(lo), int(hi)) for e in range(base.m)}
    else:
        slots = {int(e): (int(r[0]), int(r[1])) for e, r in slots_raw.items()}
    return SearchSpec(
        base=base,
        slots=slots,
        objective=raw.get("objective", "maximize-pos"),
        targets={k: Fraction(str(v)) for k, v in raw.get("targets", {}).items()},
        require_unique_nash=bool(raw.get("require_unique_nash", False)),
        target_nash=raw.get("target_nash"),
        fixed_sums=raw.get("fixed_sums"),
        budget=int(raw.get("budget", 1000)),
        seed=int(raw.get("seed", 0)),
        patience=int(raw.get("patience", 200)),
    )


def result_instance_text(result: SearchResult, seed: int) -> str:
    notes = [f"searched: seed {seed}, {result.evaluations} exact evaluations"]
    return serialize_instance(result.game, notes)
