"""Brute-force reference implementations used by the tests.

Independent of the package internals: costs are plain (const, eps) tuples of
Fractions compared lexicographically, paths are edge subsets found by trying
every subset, optima are minimum Steiner forests over all edge subsets.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction


def cost_pairs(game):
    return [(Fraction(e.cost.a), Fraction(e.cost.b)) for e in game.edges]


def add(x, y):
    return (x[0] + y[0], x[1] + y[1])


def scale(x, q):
    return (x[0] * q, x[1] * q)


ZERO = (Fraction(0), Fraction(0))


def total(pairs):
    out = ZERO
    for p in pairs:
        out = add(out, p)
    return out


def H(j):
    return sum((Fraction(1, i) for i in range(1, j + 1)), Fraction(0))


def _walks_through(game, s, t, subset):
    """True iff ``subset`` is exactly the edge set of a simple s-t path."""
    if s == t:
        return not subset
    left = set(subset)
    x, seen = s, {s}
    while x != t:
        nxt = []
        for e in left:
            ed = game.edges[e]
            if ed.u == x:
                nxt.append((e, ed.v))
            elif ed.v == x and not game.directed:
                nxt.append((e, ed.u))
        if len(nxt) != 1:
            return False
        e, y = nxt[0]
        if y in seen:
            return False
        left.discard(e)
        seen.add(y)
        x = y
    return not left


def path_sets(game, i):
    s, t = game.players[i]
    out = []
    for r in range(game.m + 1):
        for sub in itertools.combinations(range(game.m), r):
            if _walks_through(game, s, t, sub):
                out.append(frozenset(sub))
    return out


def all_profiles(game):
    return list(itertools.product(*[path_sets(game, i) for i in range(game.k)]))


def loads(profile):
    return Counter(e for p in profile for e in p)


def player_cost(game, profile, i):
    c = cost_pairs(game)
    ld = loads(profile)
    return total(scale(c[e], Fraction(1, ld[e])) for e in profile[i])


def social(game, profile):
    c = cost_pairs(game)
    return total(c[e] for e in loads(profile))


def potential(game, profile):
    c = cost_pairs(game)
    return total(scale(c[e], H(l)) for e, l in loads(profile).items())


def deviation_cost(game, profile, i, path):
    c = cost_pairs(game)
    others = loads(profile[:i] + profile[i + 1:])
    return total(scale(c[e], Fraction(1, others[e] + 1)) for e in path)


def is_ne(game, profile, paths=None):
    for i in range(game.k):
        own = player_cost(game, profile, i)
        for p in (paths[i] if paths else path_sets(game, i)):
            if deviation_cost(game, profile, i, p) < own:
                return False
    return True


def connects(game, subset, s, t):
    reach, frontier = {s}, [s]
    while frontier:
        x = frontier.pop()
        for e in subset:
            ed = game.edges[e]
            for a, b in ((ed.u, ed.v), (ed.v, ed.u)):
                if a == x and b not in reach and (not game.directed or (a, b) == (ed.u, ed.v)):
                    reach.add(b)
                    frontier.append(b)
    return t in reach


def steiner_forest_cost(game):
    c = cost_pairs(game)
    best = None
    for r in range(game.m + 1):
        for sub in itertools.combinations(range(game.m), r):
            if all(connects(game, sub, s, t) for s, t in game.players):
                val = total(c[e] for e in sub)
                if best is None or val < best:
                    best = val
    return best


def as_sets(profile):
    """Package StrategyProfile -> tuple of edge frozensets."""
    return tuple(frozenset(p.edges) for p in profile.paths)
