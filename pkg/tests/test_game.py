from fractions import Fraction

import pytest
from hypothesis import given, settings

import oracles
from conftest import seeds, small_game
from shapley_nd.errors import ExplosionError, InvalidGameError
from shapley_nd.exact import EpsCost, harmonic
from shapley_nd.game import (
    Game,
    StrategyProfile,
    enumerate_simple_paths,
    path_from_edges,
    player_cost,
    potential,
    profile_of,
    require_valid,
    social_cost,
    usage_histogram,
    validate_game,
)


def triangle():
    return Game.build(3, [(0, 1, 1), (1, 2, 1), (0, 2, 3)], [(0, 2), (1, 2)])


def test_validation_messages():
    g = Game.build(3, [(0, 1, 0), (1, 1, 2), (0, 5, 1)], [(0, 2)])
    msgs = validate_game(g)
    assert "edge 0 has non-positive cost 0" in msgs
    assert "edge 1 is a self-loop" in msgs
    assert any("endpoint outside" in m for m in msgs)
    assert any("player 0 has no path" in m for m in msgs)
    with pytest.raises(InvalidGameError) as exc:
        require_valid(g)
    assert len(exc.value.violations) == len(msgs)


def test_pure_eps_cost_is_valid():
    g = Game.build(2, [(0, 1, (0, 1))], [(0, 1)])
    assert validate_game(g) == []


def test_directed_reachability():
    g = Game.build(2, [(1, 0, 1)], [(0, 1)], directed=True)
    assert validate_game(g) == ["player 0 has no path from 0 to 1"]


def test_paths_lexicographic():
    paths = enumerate_simple_paths(triangle(), 0)
    assert [p.edges for p in paths] == [(0, 1), (2,)]
    assert paths[0].vertices == (0, 1, 2)


def test_parallel_edges_are_distinct_paths():
    g = Game.build(2, [(0, 1, 1), (0, 1, 2), (1, 0, 3)], [(0, 1)])
    assert [p.edges for p in enumerate_simple_paths(g, 0)] == [(0,), (1,), (2,)]


def test_path_cap():
    g = Game.build(2, [(0, 1, 1)] * 4, [(0, 1)])
    assert len(enumerate_simple_paths(g, 0, cap=4)) == 4
    with pytest.raises(ExplosionError) as exc:
        enumerate_simple_paths(g, 0, cap=3)
    assert exc.value.cap == 3


def test_same_endpoints_gives_empty_path():
    g = Game.build(2, [(0, 1, 1)], [(1, 1)])
    assert [p.edges for p in enumerate_simple_paths(g, 0)] == [()]


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_paths_match_subset_oracle(seed):
    for directed in (False, True):
        g = small_game(seed, max_vertices=5, directed=directed)
        for i in range(g.k):
            got = [frozenset(p.edges) for p in enumerate_simple_paths(g, i)]
            assert len(got) == len(set(got))
            assert set(got) == set(oracles.path_sets(g, i))


def test_costs_on_triangle():
    g = triangle()
    prof = profile_of(g, [[0, 1], [1]])
    assert player_cost(g, prof, 0) == EpsCost(Fraction(3, 2))
    assert player_cost(g, prof, 1) == EpsCost(Fraction(1, 2))
    assert social_cost(g, prof) == EpsCost(2)
    assert potential(g, prof) == EpsCost(1) + EpsCost(harmonic(2))
    assert usage_histogram(g, prof) == [EpsCost(1), EpsCost(1)]


def test_path_from_edges_rejects_broken_walk():
    g = triangle()
    with pytest.raises(ValueError, match="does not leave"):
        path_from_edges(g, 0, [1])
    with pytest.raises(ValueError, match="repeats a vertex"):
        path_from_edges(g, 0, [0, 1, 2])


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_cost_and_potential_match_oracle(seed):
    g = small_game(seed, max_players=4)
    by_set = [{frozenset(p.edges): p for p in enumerate_simple_paths(g, i)} for i in range(g.k)]
    for sets in oracles.all_profiles(g)[:40]:
        prof = StrategyProfile(tuple(by_set[i][p] for i, p in enumerate(sets)))
        assert (social_cost(g, prof).a, social_cost(g, prof).b) == oracles.social(g, sets)
        assert (potential(g, prof).a, potential(g, prof).b) == oracles.potential(g, sets)
        # cost <= potential <= H_k * cost
        c, phi = social_cost(g, prof), potential(g, prof)
        assert c <= phi <= c * harmonic(g.k)
