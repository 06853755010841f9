"""Closed-form bounds, inefficiency ratios, and per-instance verifiers for the
inequalities behind the general price-of-stability bound."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .equilibria import analyze, is_nash
from .errors import DegenerateError, PreconditionError, StructureError
from .exact import EpsCost, Ratio, harmonic, sum_costs
from .game import (
    DEFAULT_PATH_CAP,
    Game,
    Path,
    StrategyProfile,
    edge_loads,
    player_cost,
    potential,
    social_cost,
    usage_histogram,
)
from .space import DEFAULT_PROFILE_BUDGET


def _check_k(k: int) -> None:
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")


def lemma1_factor(k: int) -> Fraction:
    """k^2 (k+1) / 2 - k."""
    return Fraction(k * k * (k + 1), 2) - k


def theorem_bound(k: int) -> Fraction:
    """Upper bound on the price of stability (and the potential-optimal price
    of anarchy) for k players: (k^3(k+1)/2 - k^2) / (1 + k^3(k+1)/2 - k^2) * H_k."""
    _check_k(k)
    top = Fraction(k**3 * (k + 1), 2) - k * k
    return top / (1 + top) * harmonic(k)


def gap_factor(k: int) -> Fraction:
    """1 - theorem_bound(k) / H_k."""
    return 1 - theorem_bound(k) / harmonic(k)


def lemma2_bound(beta: Fraction, k: int) -> Fraction:
    beta = Fraction(beta)
    if beta <= 0:
        raise ValueError("beta must be positive")
    _check_k(k)
    return beta * k / (1 + beta * k) * harmonic(k)


@dataclass(frozen=True)
class RatioReport:
    pos: Ratio
    poa: Ratio
    popos: Ratio
    popoa: Ratio
    optimum: StrategyProfile
    best_nash: StrategyProfile
    worst_nash: StrategyProfile
    best_potential_minimum: StrategyProfile
    worst_potential_minimum: StrategyProfile

    def chain_holds(self) -> bool:
        return self.pos <= self.popos <= self.popoa <= self.poa


def ratios(game: Game, cap: int = DEFAULT_PATH_CAP, budget: int = DEFAULT_PROFILE_BUDGET) -> RatioReport:
    an = analyze(game, cap, budget)
    opt = an.optima.value
    if opt.a == 0:
        raise DegenerateError(f"optimum cost {opt} has no constant term; eps -> 0 limit undefined")
    costs = {p: social_cost(game, p) for p in an.nash.profiles}

    def pick(profiles, target):
        return next(p for p in profiles if costs[p] == target)

    return RatioReport(
        pos=Ratio(an.nash_cost_min, opt),
        poa=Ratio(an.nash_cost_max, opt),
        popos=Ratio(an.popos_cost, opt),
        popoa=Ratio(an.popoa_cost, opt),
        optimum=an.optima.profiles[0],
        best_nash=pick(an.nash.profiles, an.nash_cost_min),
        worst_nash=pick(an.nash.profiles, an.nash_cost_max),
        best_potential_minimum=pick(an.potential_minima.profiles, an.popos_cost),
        worst_potential_minimum=pick(an.potential_minima.profiles, an.popoa_cost),
    )


def _below_k(hist: list[EpsCost]) -> EpsCost:
    return sum_costs(hist[:-1])


def shared_by_all(game: Game, profile: StrategyProfile) -> list[int]:
    """Edges used by every player (the top multiplicity class)."""
    return [e for e, l in edge_loads(profile).items() if l == game.k]


def _require_preconditions(game, N, O, optimum_value):
    if not is_nash(game, N):
        raise PreconditionError("N is not a Nash equilibrium")
    if optimum_value is None:
        optimum_value = analyze(game).optima.value
    if social_cost(game, O) != optimum_value:
        raise PreconditionError("O is not a social optimum")


@dataclass(frozen=True)
class LemmaOneReport:
    applicable: bool
    lhs: EpsCost
    factor: Fraction
    rhs: EpsCost
    holds: bool
    # Aggregated deviation-path view: sum of both inequality-(1) left sides over
    # all players, the |Q| + |Q^| total they are bounded by, and (k+2)*sum|O^j|.
    deviation_lhs: EpsCost | None = None
    deviation_q_total: EpsCost | None = None
    deviation_q_bound: EpsCost | None = None


def lemma1_check(game: Game, N: StrategyProfile, O: StrategyProfile, *, optimum_value=None, check=True) -> LemmaOneReport:
    """Sum over non-shared N edges <= (k^2(k+1)/2 - k) * sum over non-shared O edges."""
    if check:
        _require_preconditions(game, N, O, optimum_value)
    k = game.k
    hn = usage_histogram(game, N)
    ho = usage_histogram(game, O)
    factor = lemma1_factor(k)
    lhs = _below_k(hn)
    rhs = _below_k(ho) * factor
    applicable = bool(ho[-1]) and k >= 2 and not game.directed
    report = LemmaOneReport(applicable, lhs, factor, rhs, lhs <= rhs)
    if not applicable:
        return report
    order = major_tree_order(game, O)
    dev_lhs = EpsCost.zero()
    q_total = EpsCost.zero()
    for i in range(k):
        for direction in ("successor", "predecessor"):
            cert = deviation_path(game, N, O, i, direction, order=order)
            dev_lhs = dev_lhs + cert.ineq_lhs
            q_total = q_total + cert.ineq_rhs
    return LemmaOneReport(
        applicable,
        lhs,
        factor,
        rhs,
        lhs <= rhs,
        deviation_lhs=dev_lhs,
        deviation_q_total=q_total,
        deviation_q_bound=_below_k(ho) * (k + 2),
    )


@dataclass(frozen=True)
class LemmaTwoReport:
    beta: Fraction
    bound: Fraction
    potential_antecedent: bool
    beta_antecedent: bool
    conclusion: bool
    cost_n: EpsCost
    cost_o: EpsCost

    @property
    def holds(self) -> bool:
        """The implication: antecedents imply the conclusion."""
        return self.conclusion or not (self.potential_antecedent and self.beta_antecedent)


def lemma2_check(game: Game, N: StrategyProfile, O: StrategyProfile, beta: Fraction | None = None) -> LemmaTwoReport:
    k = game.k
    _check_k(k)
    if beta is None:
        beta = lemma1_factor(k)
    beta = Fraction(beta)
    hn = usage_histogram(game, N)
    ho = usage_histogram(game, O)
    bound = lemma2_bound(beta, k)
    cn = social_cost(game, N)
    co = social_cost(game, O)
    return LemmaTwoReport(
        beta=beta,
        bound=bound,
        potential_antecedent=potential(game, N) <= potential(game, O),
        beta_antecedent=_below_k(hn) <= _below_k(ho) * beta,
        conclusion=cn <= co * bound,
        cost_n=cn,
        cost_o=co,
    )


@dataclass(frozen=True)
class HkMinusOneReport:
    potential_antecedent: bool
    coefficient: Fraction
    holds: bool
    cost_n: EpsCost
    cost_o: EpsCost


def hk_minus1_check(game: Game, N: StrategyProfile, O: StrategyProfile) -> HkMinusOneReport:
    """cost(N) <= H_{k-1} cost(O) when no edge of O is shared by all players."""
    k = game.k
    _check_k(k)
    if shared_by_all(game, O):
        raise PreconditionError("O has edges used by all players; the H_{k-1} branch does not apply")
    coeff = harmonic(k - 1)
    cn = social_cost(game, N)
    co = social_cost(game, O)
    return HkMinusOneReport(potential(game, N) <= potential(game, O), coeff, cn <= co * coeff, cn, co)


@dataclass(frozen=True)
class MajorTreeOrder:
    order: tuple[int, ...]
    plus: tuple[int, ...]
    minus: tuple[int, ...]
    shared: tuple[int, ...]
    walk: tuple[int, ...]

    def position(self, player: int) -> int:
        return self.order.index(player)


def major_tree_order(game: Game, O: StrategyProfile) -> MajorTreeOrder:
    """Split E(O) minus the all-shared edges into the two trees and order the
    players by a depth-first closed walk of the costlier tree."""
    k = game.k
    if k < 2:
        raise StructureError("major-tree order needs at least two players")
    if game.directed:
        raise StructureError("major-tree order is defined for undirected games only")
    loads = edge_loads(O)
    shared = [e for e, l in loads.items() if l == k]
    if not shared:
        raise StructureError("no edge of O is used by all players")
    rest = [e for e, l in loads.items() if l < k]
    verts = sorted({x for p in O.paths for x in p.vertices})
    parent = {x: x for x in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in rest:
        a, b = find(game.edges[e].u), find(game.edges[e].v)
        if a == b:
            raise StructureError(f"E(O) minus shared edges has a cycle through edge {e}")
        parent[a] = b
    term_comps = sorted({find(x) for st in game.players for x in st})
    if len(term_comps) != 2:
        raise StructureError(f"terminals lie in {len(term_comps)} trees of E(O) minus shared edges, expected 2")
    for i, (s, t) in enumerate(game.players):
        if find(s) == find(t):
            raise StructureError(f"player {i} has both terminals in the same tree")
    for e in rest:
        if find(game.edges[e].u) not in term_comps:
            raise StructureError(f"edge {e} lies in a tree without terminals")
    comp_edges = {c: sorted(e for e in rest if find(game.edges[e].u) == c) for c in term_comps}
    comp_cost = {c: sum_costs(game.cost(e) for e in comp_edges[c]) for c in term_comps}

    def tie_key(c):
        es = comp_edges[c]
        return (0, es[0]) if es else (1, min(x for x in verts if find(x) == c))

    c1, c2 = term_comps
    if comp_cost[c1] != comp_cost[c2]:
        plus = c1 if comp_cost[c1] > comp_cost[c2] else c2
    else:
        plus = min(term_comps, key=tie_key)
    minus = c2 if plus == c1 else c1

    root = min(x for x in verts if find(x) == plus)
    plus_edges = set(comp_edges[plus])
    walk = [root]
    first_visit = {root: 0}
    seen = {root}

    def dfs(x):
        for eid, y in sorted(game.neighbors(x)):
            if eid in plus_edges and y not in seen:
                seen.add(y)
                first_visit[y] = len(walk)
                walk.append(y)
                dfs(y)
                walk.append(x)

    dfs(root)

    def key(i):
        s, t = game.players[i]
        x = s if find(s) == plus else t
        return (first_visit[x], i)

    order = tuple(sorted(range(k), key=key))
    return MajorTreeOrder(order, tuple(comp_edges[plus]), tuple(comp_edges[minus]), tuple(shared), tuple(walk))


@dataclass(frozen=True)
class DeviationCertificate:
    player: int
    partner: int
    path: Path
    q_edges: tuple[int, ...]
    property_holds: bool
    nash_holds: bool
    ineq_lhs: EpsCost
    ineq_rhs: EpsCost

    @property
    def ineq_holds(self) -> bool:
        return self.ineq_lhs <= self.ineq_rhs

    @property
    def holds(self) -> bool:
        return self.property_holds and self.nash_holds and self.ineq_holds


def _oriented(game: Game, path: Path, start: int):
    """(vertices, edges) of ``path`` walked from ``start``."""
    if path.vertices[0] == start:
        return list(path.vertices), list(path.edges)
    return list(reversed(path.vertices)), list(reversed(path.edges))


def _erase_loops(start: int, steps) -> Path:
    verts = [start]
    edges: list[int] = []
    pos = {start: 0}
    for eid, y in steps:
        if y in pos:
            cut = pos[y]
            for x in verts[cut + 1 :]:
                del pos[x]
            verts = verts[: cut + 1]
            edges = edges[:cut]
        else:
            edges.append(eid)
            verts.append(y)
            pos[y] = len(verts) - 1
    return Path(tuple(edges), tuple(verts))


def deviation_path(
    game: Game,
    N: StrategyProfile,
    O: StrategyProfile,
    i: int,
    direction: str = "successor",
    order: MajorTreeOrder | None = None,
) -> DeviationCertificate:
    """Build player i's alternative path through the optimum and the
    equilibrium path of the neighbour in major-tree order, and certify it.

    The walk follows O_i to u, O_j back to s_j, N_j to t_j, O_j back to v and
    O_i on to t_i, where u and v are the first and last vertices of O_i lying
    on O_j. Loops are then cut out.
    """
    if direction not in ("successor", "predecessor"):
        raise ValueError(f"unknown direction {direction!r}")
    if order is None:
        order = major_tree_order(game, O)
    k = game.k
    pos = order.position(i)
    step = 1 if direction == "successor" else -1
    j = order.order[(pos + step) % k]
    common = set(O[i].edges) & set(O[j].edges)
    if not common:
        raise StructureError(f"optimal paths of players {i} and {j} share no edge")

    si, ti = game.players[i]
    sj, tj = game.players[j]
    vi, ei = _oriented(game, O[i], si)
    vj, ej = _oriented(game, O[j], sj)
    on_j = {x: n for n, x in enumerate(vj)}
    hits = [n for n, x in enumerate(vi) if x in on_j]
    iu, iv = hits[0], hits[-1]
    u, v = vi[iu], vi[iv]
    if on_j[u] > on_j[v]:
        sj, tj = tj, sj
        vj, ej = vj[::-1], ej[::-1]
        on_j = {x: n for n, x in enumerate(vj)}
    pu, pv = on_j[u], on_j[v]
    nv, ne = _oriented(game, N[j], sj)

    steps = []
    steps += list(zip(ei[:iu], vi[1 : iu + 1]))
    # O_j backwards from u to s_j
    steps += [(ej[n - 1], vj[n - 1]) for n in range(pu, 0, -1)]
    steps += list(zip(ne, nv[1:]))
    # O_j backwards from t_j to v
    steps += [(ej[n - 1], vj[n - 1]) for n in range(len(vj) - 1, pv, -1)]
    steps += list(zip(ei[iv:], vi[iv + 1 :]))
    path = _erase_loops(si, steps)
    if path.vertices[-1] != ti:
        raise StructureError(f"deviation walk for player {i} ends at {path.vertices[-1]}, not {ti}")

    n_j = set(N[j].edges)
    n_i = set(N[i].edges)
    shared_all = set(shared_by_all(game, O))
    prop = all((e in n_j) or (e not in common and e not in shared_all) for e in path.edges)
    o_edges = {e for p in O.paths for e in p.edges}
    q = tuple(e for e in path.edges if e in o_edges)

    loads = edge_loads(N)
    lhs = sum_costs(game.cost(e) / loads[e] for e in sorted(n_i - n_j)) - sum_costs(
        game.cost(e) / (loads[e] + 1) for e in sorted(n_j - n_i)
    )
    rhs = sum_costs(game.cost(e) for e in q)
    nash_ok = player_cost(game, N, i) <= player_cost(game, N.replace(i, path), i)
    return DeviationCertificate(i, j, path, q, prop, nash_ok, lhs, rhs)


@dataclass(frozen=True)
class TheoremReport:
    k: int
    bound: Fraction
    holds: bool
    pairs: tuple
    worst: Ratio | None


def theorem_check(game: Game, cap: int = DEFAULT_PATH_CAP, budget: int = DEFAULT_PROFILE_BUDGET) -> TheoremReport:
    """Check cost(N) <= theorem_bound(k) * cost(O) for every potential minimum
    N against every optimum O, together with the branch-specific inequality."""
    k = game.k
    _check_k(k)
    if game.directed:
        raise PreconditionError("the bound is stated for undirected games")
    an = analyze(game, cap, budget)
    f = theorem_bound(k)
    pairs = []
    ok = True
    worst = None
    for O in an.optima.profiles:
        co = social_cost(game, O)
        branch_all_shared = bool(shared_by_all(game, O))
        for N in an.potential_minima.profiles:
            cn = social_cost(game, N)
            main = cn <= co * f
            if branch_all_shared:
                l1 = lemma1_check(game, N, O, check=False)
                l2 = lemma2_check(game, N, O)
                branch = {"branch": "shared", "lemma1": l1.holds, "lemma2": l2.holds}
                branch_ok = l1.holds and l2.holds
            else:
                h = hk_minus1_check(game, N, O)
                branch = {"branch": "unshared", "hk_minus1": h.holds}
                branch_ok = h.holds
            ok = ok and main and branch_ok
            if co.is_positive():
                r = Ratio(cn, co)
                if worst is None or r > worst:
                    worst = r
            pairs.append((N, O, main, branch))
    return TheoremReport(k, f, ok, tuple(pairs), worst)
