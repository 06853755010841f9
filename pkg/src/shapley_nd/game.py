"""Game representation, simple paths, and the cost and potential functions."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ExplosionError, InvalidGameError
from .exact import EpsCost, harmonic, sum_costs

DEFAULT_PATH_CAP = 10_000


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    cost: EpsCost

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class Game:
    """A Shapley network design game.

    Edge ids are positions in ``edges``; parallel edges are allowed. Players are
    ``(source, target)`` pairs.
    """

    vertex_count: int
    edges: tuple[Edge, ...]
    players: tuple[tuple[int, int], ...]
    directed: bool = False
    name: str = ""
    _adj: tuple = field(default=(), init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "players", tuple(tuple(p) for p in self.players))
        adj: list[list[tuple[int, int]]] = [[] for _ in range(max(self.vertex_count, 0))]
        for eid, e in enumerate(self.edges):
            if 0 <= e.u < self.vertex_count and 0 <= e.v < self.vertex_count:
                adj[e.u].append((eid, e.v))
                if not self.directed and e.u != e.v:
                    adj[e.v].append((eid, e.u))
        object.__setattr__(self, "_adj", tuple(tuple(a) for a in adj))

    @classmethod
    def build(cls, vertex_count, edges, players, directed=False, name=""):
        """Convenience constructor: ``edges`` items are ``(u, v, cost)`` with
        cost an EpsCost, a number, or an ``(a, b)`` pair."""
        built = []
        for u, v, c in edges:
            if isinstance(c, tuple):
                c = EpsCost(*c)
            built.append(Edge(u, v, EpsCost.of(c)))
        return cls(vertex_count, tuple(built), tuple(players), directed, name)

    @property
    def k(self) -> int:
        return len(self.players)

    @property
    def m(self) -> int:
        return len(self.edges)

    def cost(self, eid: int) -> EpsCost:
        return self.edges[eid].cost

    def neighbors(self, x: int):
        """(edge id, other endpoint) pairs leaving ``x``."""
        return self._adj[x]

    def with_costs(self, costs: Sequence[EpsCost]) -> "Game":
        edges = tuple(Edge(e.u, e.v, EpsCost.of(c)) for e, c in zip(self.edges, costs))
        return Game(self.vertex_count, edges, self.players, self.directed, self.name)

    def renamed(self, name: str) -> "Game":
        return Game(self.vertex_count, self.edges, self.players, self.directed, name)


@dataclass(frozen=True, order=True)
class Path:
    """A simple path given by its edge ids; ``vertices`` is derived."""

    edges: tuple[int, ...]
    vertices: tuple[int, ...] = field(compare=False)

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, eid):
        return eid in self.edges


def path_from_edges(game: Game, start: int, edge_ids: Sequence[int]) -> Path:
    """Build a Path from ``start`` along ``edge_ids``, checking adjacency,
    direction and simplicity."""
    verts = [start]
    cur = start
    for eid in edge_ids:
        e = game.edges[eid]
        if e.u == cur:
            cur = e.v
        elif e.v == cur and not game.directed:
            cur = e.u
        else:
            raise ValueError(f"edge {eid} does not leave vertex {cur}")
        verts.append(cur)
    if len(set(verts)) != len(verts):
        raise ValueError(f"path {list(edge_ids)} repeats a vertex")
    return Path(tuple(edge_ids), tuple(verts))


@dataclass(frozen=True, order=True)
class StrategyProfile:
    paths: tuple[Path, ...]

    def __getitem__(self, i) -> Path:
        return self.paths[i]

    def __len__(self):
        return len(self.paths)

    def replace(self, i: int, path: Path) -> "StrategyProfile":
        ps = list(self.paths)
        ps[i] = path
        return StrategyProfile(tuple(ps))

    def edge_ids(self) -> tuple[list[int], ...]:
        return tuple(list(p.edges) for p in self.paths)


def profile_of(game: Game, edge_lists) -> StrategyProfile:
    """StrategyProfile from per-player edge-id lists."""
    return StrategyProfile(
        tuple(path_from_edges(game, s, el) for (s, _), el in zip(game.players, edge_lists))
    )


def _reachable(game: Game, s: int) -> set[int]:
    seen = {s}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for _, y in game.neighbors(x):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def validate_game(game: Game) -> list[str]:
    """Return a list of violated game invariants (empty when valid)."""
    problems = []
    n = game.vertex_count
    if n < 1:
        problems.append("vertex count must be positive")
    if game.k < 1:
        problems.append("game needs at least one player")
    for eid, e in enumerate(game.edges):
        if not (0 <= e.u < n and 0 <= e.v < n):
            problems.append(f"edge {eid} has an endpoint outside 0..{n - 1}")
        if e.u == e.v:
            problems.append(f"edge {eid} is a self-loop")
        if not e.cost.is_positive():
            problems.append(f"edge {eid} has non-positive cost {e.cost}")
    for i, (s, t) in enumerate(game.players):
        if not (0 <= s < n and 0 <= t < n):
            problems.append(f"player {i} has a terminal outside 0..{n - 1}")
            continue
        if t not in _reachable(game, s):
            problems.append(f"player {i} has no path from {s} to {t}")
    return problems


def require_valid(game: Game) -> None:
    problems = validate_game(game)
    if problems:
        raise InvalidGameError(problems)


def enumerate_simple_paths(game: Game, player: int, cap: int = DEFAULT_PATH_CAP) -> list[Path]:
    """All simple paths of ``player`` in lexicographic edge-id order.

    Raises ExplosionError as soon as more than ``cap`` paths are found.
    """
    s, t = game.players[player]
    if s == t:
        return [Path((), (s,))]
    out: list[Path] = []
    edges: list[int] = []
    verts = [s]
    on_path = {s}

    # Neighbors sorted by edge id so DFS emits paths in lexicographic order.
    nbrs = [sorted(game.neighbors(x)) for x in range(game.vertex_count)]

    def dfs(x):
        for eid, y in nbrs[x]:
            if y in on_path:
                continue
            edges.append(eid)
            verts.append(y)
            if y == t:
                out.append(Path(tuple(edges), tuple(verts)))
                if len(out) > cap:
                    raise ExplosionError(f"simple paths of player {player}", cap, len(out))
            else:
                on_path.add(y)
                dfs(y)
                on_path.discard(y)
            edges.pop()
            verts.pop()

    dfs(s)
    return out


def edge_loads(profile: StrategyProfile) -> dict[int, int]:
    """Number of players using each edge; unused edges are absent."""
    loads: Counter = Counter()
    for p in profile.paths:
        loads.update(p.edges)
    return dict(sorted(loads.items()))


def player_cost(game: Game, profile: StrategyProfile, i: int) -> EpsCost:
    loads = edge_loads(profile)
    return sum_costs(game.cost(e) / loads[e] for e in profile[i].edges)


def used_edges(profile: StrategyProfile) -> list[int]:
    return sorted({e for p in profile.paths for e in p.edges})


def social_cost(game: Game, profile: StrategyProfile) -> EpsCost:
    """Total cost of the used edges, cross-checked against the sum of shares."""
    by_edges = sum_costs(game.cost(e) for e in used_edges(profile))
    by_players = sum_costs(player_cost(game, profile, i) for i in range(len(profile)))
    assert by_edges == by_players, (by_edges, by_players)
    return by_edges


def potential(game: Game, profile: StrategyProfile) -> EpsCost:
    """Rosenthal's potential: sum over used edges of H(load) * cost."""
    return sum_costs(game.cost(e) * harmonic(l) for e, l in edge_loads(profile).items())


def usage_histogram(game: Game, profile: StrategyProfile) -> list[EpsCost]:
    """Entry ``j - 1`` is the total cost of edges used by exactly ``j`` players."""
    k = game.k
    buckets: list[list[EpsCost]] = [[] for _ in range(k)]
    for e, l in edge_loads(profile).items():
        buckets[l - 1].append(game.cost(e))
    return [sum_costs(b) for b in buckets]
