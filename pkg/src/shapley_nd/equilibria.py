"""Best responses, Nash detection, exhaustive equilibrium computation and
best-response dynamics."""

from __future__ import annotations

import heapq
import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import BudgetError, ExplosionError, InvariantViolation, NoPathError
from .exact import EpsCost
from .game import (
    DEFAULT_PATH_CAP,
    Game,
    Path,
    StrategyProfile,
    edge_loads,
    enumerate_simple_paths,
    player_cost,
    potential,
    require_valid,
    social_cost,
    used_edges,
)
from .space import DEFAULT_PROFILE_BUDGET, Evaluation, ProfileSpace

NASH = "nash"
POTENTIAL_MINIMUM = "potential-minimum"
SOCIAL_OPTIMUM = "social-optimum"


@dataclass(frozen=True)
class BestResponse:
    player: int
    path: Path
    cost: EpsCost


def best_response(game: Game, profile: StrategyProfile, i: int) -> BestResponse:
    """Cheapest path for player ``i`` against the others' fixed paths.

    Edge ``e`` is weighted ``c_e / (load of the others on e + 1)``; among
    equally cheap paths the lexicographically least edge sequence wins.
    """
    s, t = game.players[i]
    if s == t:
        return BestResponse(i, Path((), (s,)), EpsCost.zero())
    others = edge_loads(profile)
    for e in profile[i].edges:
        others[e] -= 1
    # Labels (distance, edge sequence) are strictly increased by extension and
    # preserve order under a common suffix, so Dijkstra on them is exact.
    heap = [(EpsCost.zero(), (), (s,))]
    done = set()
    while heap:
        dist, edges, verts = heapq.heappop(heap)
        x = verts[-1]
        if x in done:
            continue
        done.add(x)
        if x == t:
            return BestResponse(i, Path(edges, verts), dist)
        for eid, y in game.neighbors(x):
            if y in done:
                continue
            w = game.cost(eid) / (others.get(eid, 0) + 1)
            heapq.heappush(heap, (dist + w, edges + (eid,), verts + (y,)))
    raise NoPathError(f"player {i} cannot reach {t} from {s}")


def is_nash(game: Game, profile: StrategyProfile) -> bool:
    return all(
        player_cost(game, profile, i) <= best_response(game, profile, i).cost
        for i in range(game.k)
    )


def enumerate_profiles(game: Game, cap: int = DEFAULT_PATH_CAP, budget: int = DEFAULT_PROFILE_BUDGET):
    """Yield every strategy profile, player 0's path varying slowest."""
    per_player = [enumerate_simple_paths(game, i, cap) for i in range(game.k)]
    total = 1
    for p in per_player:
        total *= len(p)
    if total > budget:
        raise ExplosionError("strategy profiles", budget, total)
    for combo in itertools.product(*per_player):
        yield StrategyProfile(tuple(combo))


@dataclass(frozen=True)
class EquilibriumSet:
    kind: str
    profiles: tuple[StrategyProfile, ...]
    value: EpsCost | None = None

    def __len__(self):
        return len(self.profiles)

    def __iter__(self):
        return iter(self.profiles)

    def __contains__(self, p):
        return p in self.profiles


@dataclass
class Analysis:
    """Exhaustive classification of a game's profiles."""

    game: Game
    evaluation: Evaluation
    nash: EquilibriumSet
    optima: EquilibriumSet
    potential_minima: EquilibriumSet
    nash_cost_min: EpsCost
    nash_cost_max: EpsCost
    popos_cost: EpsCost
    popoa_cost: EpsCost
    extra: dict = field(default_factory=dict)


def _eval_range(space: ProfileSpace, lo: int, hi: int) -> Evaluation:
    return space.evaluate(ranges=[(lo, hi)])


def _merge(evals: list[Evaluation]) -> Evaluation:
    first = evals[0]
    nash = [x for ev in evals for x in ev.nash]
    opt_v = min(ev.optimum_value for ev in evals)
    pot_v = min(ev.potential_min_value for ev in evals)
    nmins = [ev.nash_cost_min for ev in evals if ev.nash_cost_min is not None]
    nmaxs = [ev.nash_cost_max for ev in evals if ev.nash_cost_max is not None]
    return Evaluation(
        space=first.space,
        encoding=first.encoding,
        costs=first.costs,
        nash=nash,
        optima=[x for ev in evals if ev.optimum_value == opt_v for x in ev.optima],
        optimum_value=opt_v,
        potential_minima=[x for ev in evals if ev.potential_min_value == pot_v for x in ev.potential_minima],
        potential_min_value=pot_v,
        nash_cost_min=min(nmins) if nmins else None,
        nash_cost_max=max(nmaxs) if nmaxs else None,
    )


def evaluate_space(space: ProfileSpace, workers: int = 1) -> Evaluation:
    """Evaluate a space, optionally split into contiguous index ranges across
    processes. The merged result is identical to the single-worker one."""
    if workers <= 1 or space.size < 2:
        return space.evaluate()
    n = min(workers, space.size)
    bounds = [space.size * j // n for j in range(n + 1)]
    with ProcessPoolExecutor(max_workers=n) as pool:
        parts = list(pool.map(_eval_range, [space] * n, bounds[:-1], bounds[1:]))
    return _merge(parts)


def is_forest(game: Game, edge_ids) -> bool:
    parent = list(range(game.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edge_ids:
        a, b = find(game.edges[e].u), find(game.edges[e].v)
        if a == b:
            return False
        parent[a] = b
    return True


@lru_cache(maxsize=128)
def analyze(game: Game, cap: int = DEFAULT_PATH_CAP, budget: int = DEFAULT_PROFILE_BUDGET, workers: int = 1) -> Analysis:
    require_valid(game)
    space = ProfileSpace(game, cap, budget)
    ev = evaluate_space(space, workers)
    if not ev.nash:
        raise InvariantViolation("no Nash equilibrium found", witness=game)
    nash = tuple(space.profile(x) for x in ev.nash)
    optima = tuple(space.profile(x) for x in ev.optima)
    pmins = tuple(space.profile(x) for x in ev.potential_minima)
    nash_set = set(ev.nash)
    for x in ev.potential_minima:
        if x not in nash_set:
            raise InvariantViolation("potential minimum is not a Nash equilibrium", witness=space.profile(x))
    if not game.directed:
        for o in optima:
            if not is_forest(game, used_edges(o)):
                raise InvariantViolation("social optimum contains a cycle", witness=o)
    pm_costs = [social_cost(game, p) for p in pmins]
    return Analysis(
        game=game,
        evaluation=ev,
        nash=EquilibriumSet(NASH, nash),
        optima=EquilibriumSet(SOCIAL_OPTIMUM, optima, ev.optimum_value),
        potential_minima=EquilibriumSet(POTENTIAL_MINIMUM, pmins, ev.potential_min_value),
        nash_cost_min=ev.nash_cost_min,
        nash_cost_max=ev.nash_cost_max,
        popos_cost=min(pm_costs),
        popoa_cost=max(pm_costs),
    )


def all_nash(game: Game, cap: int = DEFAULT_PATH_CAP, budget: int = DEFAULT_PROFILE_BUDGET) -> EquilibriumSet:
    return analyze(game, cap, budget).nash


def social_optimum(game: Game, cap: int = DEFAULT_PATH_CAP, budget: int = DEFAULT_PROFILE_BUDGET) -> EquilibriumSet:
    return analyze(game, cap, budget).optima


def potential_minima(game: Game, cap: int = DEFAULT_PATH_CAP, budget: int = DEFAULT_PROFILE_BUDGET) -> EquilibriumSet:
    return analyze(game, cap, budget).potential_minima


@dataclass(frozen=True)
class DynamicsStep:
    player: int
    old_path: Path
    new_path: Path
    delta_cost: EpsCost
    potential_after: EpsCost


@dataclass(frozen=True)
class DynamicsTrace:
    start: StrategyProfile
    steps: tuple[DynamicsStep, ...]
    terminal: StrategyProfile


def best_response_dynamics(
    game: Game,
    start: StrategyProfile,
    schedule: str = "round-robin",
    seed: int = 0,
    max_steps: int = 10_000,
) -> DynamicsTrace:
    """Let one strictly improving player at a time switch to a best response.

    ``round-robin`` always picks the lowest-index improving player;
    ``random`` scans players in an order drawn from ``random.Random(seed)``.
    """
    if schedule not in ("round-robin", "random"):
        raise ValueError(f"unknown schedule {schedule!r}")
    rng = random.Random(seed)
    profile = start
    phi = potential(game, profile)
    steps: list[DynamicsStep] = []
    order = list(range(game.k))
    while True:
        if schedule == "random":
            rng.shuffle(order)
        mover = None
        for i in order:
            br = best_response(game, profile, i)
            cur = player_cost(game, profile, i)
            if br.cost < cur:
                mover = (i, br, cur)
                break
        if mover is None:
            return DynamicsTrace(start, tuple(steps), profile)
        if len(steps) >= max_steps:
            raise BudgetError(
                f"dynamics exceeded {max_steps} steps; potential trace tail: "
                + ", ".join(str(s.potential_after) for s in steps[-5:])
            )
        i, br, cur = mover
        old = profile[i]
        profile = profile.replace(i, br.path)
        new_phi = potential(game, profile)
        delta = br.cost - cur
        if new_phi - phi != delta:
            raise InvariantViolation("potential change differs from cost change", witness=profile)
        phi = new_phi
        steps.append(DynamicsStep(i, old, br.path, delta, new_phi))
