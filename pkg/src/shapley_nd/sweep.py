"""Random small instances and the per-instance verification sweep."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .bounds import (
    deviation_path,
    hk_minus1_check,
    lemma1_check,
    lemma2_check,
    major_tree_order,
    ratios,
    shared_by_all,
    theorem_bound,
)
from .equilibria import analyze, is_forest, is_nash
from .exact import EpsCost, harmonic
from .game import Game, potential, social_cost, used_edges


def random_game(rng: random.Random, max_vertices: int = 5, max_players: int = 3, eps_rate: float = 0.2,
                max_cost: int = 20, directed: bool = False, min_players: int = 1) -> Game:
    """Connected multigraph: random spanning tree plus extra (possibly parallel) edges."""
    n = rng.randint(2, max_vertices)
    order = list(range(n))
    rng.shuffle(order)
    pairs = [(order[j], order[rng.randrange(j)]) for j in range(1, n)]
    for _ in range(rng.randint(0, n)):
        u, v = rng.sample(range(n), 2)
        pairs.append((u, v))
    edges = []
    for u, v in pairs:
        if rng.random() < eps_rate:
            c = EpsCost(rng.randint(0, max_cost), rng.randint(1, 3))
        else:
            c = EpsCost(rng.randint(1, max_cost), 0)
        edges.append((u, v, c))
    k = rng.randint(min_players, max_players)
    players = []
    for _ in range(k):
        s, t = rng.sample(range(n), 2)
        players.append((s, t))
    g = Game.build(n, edges, players, directed=directed)
    if directed:
        # keep every player connected by adding a direct arc when needed
        from .game import validate_game

        extra = []
        for i, (s, t) in enumerate(players):
            if any(f"player {i} has no path" in p for p in validate_game(g)):
                extra.append((s, t, EpsCost(max_cost, 0)))
        if extra:
            g = Game.build(n, edges + extra, players, directed=True)
    return g


def instance_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


@dataclass
class InstanceVerdict:
    index: int
    k: int
    checks: dict[str, bool] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def verify_instance(game: Game, index: int = 0) -> InstanceVerdict:
    """Run every per-instance property on one exhaustively solved game."""
    an = analyze(game)
    k = game.k
    v = InstanceVerdict(index, k)
    c = v.checks
    c["potential minima are Nash"] = all(is_nash(game, n) for n in an.potential_minima)
    c["optima acyclic"] = game.directed or all(is_forest(game, used_edges(o)) for o in an.optima)
    opt_value = an.optima.value
    if opt_value.a > 0:
        r = ratios(game)
        c["ratio chain"] = r.chain_holds()
    hk = harmonic(k)
    c["H_k bound"] = all(
        potential(game, n) <= potential(game, o) and social_cost(game, n) <= social_cost(game, o) * hk
        for n in an.potential_minima
        for o in an.optima
    )
    v.counts = {"nash": len(an.nash), "potential_minima": len(an.potential_minima), "optima": len(an.optima)}
    if k < 2 or game.directed:
        return v
    f = theorem_bound(k)
    c["theorem bound"] = all(
        social_cost(game, n) <= social_cost(game, o) * f for n in an.potential_minima for o in an.optima
    )
    lemma1 = lemma2 = hk1 = dev = True
    applicable = 0
    for o in an.optima:
        if shared_by_all(game, o):
            applicable += 1
            order = major_tree_order(game, o)
            for n in an.nash:
                rep = lemma1_check(game, n, o, check=False)
                lemma1 &= rep.holds
                for i in range(k):
                    for d in ("successor", "predecessor"):
                        dev &= deviation_path(game, n, o, i, d, order=order).holds
            for n in an.potential_minima:
                lemma2 &= lemma2_check(game, n, o).holds
        else:
            for n in an.potential_minima:
                hk1 &= hk_minus1_check(game, n, o).holds
    c["lemma 1"] = lemma1
    c["lemma 2"] = lemma2
    c["deviation paths"] = dev
    c["H_(k-1) branch"] = hk1
    v.counts["lemma1_applicable_optima"] = applicable
    return v


def _sweep_one(args):
    seed, index, max_vertices, max_players, min_players = args
    g = random_game(instance_rng(seed, index), max_vertices, max_players, min_players=min_players)
    return verify_instance(g, index)


def sweep(count: int, seed: int = 0, workers: int = 1, max_vertices: int = 5, max_players: int = 3,
          min_players: int = 1) -> list[InstanceVerdict]:
    """Verify ``count`` random instances. Instance j depends only on (seed, j),
    so results are identical for any worker count."""
    jobs = [(seed, j, max_vertices, max_players, min_players) for j in range(count)]
    if workers <= 1:
        return [_sweep_one(a) for a in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_one, jobs, chunksize=max(1, count // (4 * workers))))


def summarize(verdicts: list[InstanceVerdict]) -> dict:
    names = sorted({n for v in verdicts for n in v.checks})
    out = {}
    for n in names:
        relevant = [v for v in verdicts if n in v.checks]
        failed = [v.index for v in relevant if not v.checks[n]]
        out[n] = {"checked": len(relevant), "failed": failed}
    out["lemma1_applicable_instances"] = sum(1 for v in verdicts if v.counts.get("lemma1_applicable_optima"))
    return out
