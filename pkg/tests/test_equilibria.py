import random

import pytest
from hypothesis import given, settings

import oracles
from conftest import seeds, small_game
from shapley_nd.equilibria import analyze, best_response, best_response_dynamics, evaluate_space, is_forest, is_nash
from shapley_nd.errors import BudgetError, ExplosionError
from shapley_nd.exact import EpsCost
from shapley_nd.game import (
    Game,
    StrategyProfile,
    enumerate_simple_paths,
    player_cost,
    potential,
    profile_of,
    social_cost,
    used_edges,
)
from shapley_nd.space import ProfileSpace


def random_profile(g, rng):
    return StrategyProfile(tuple(rng.choice(enumerate_simple_paths(g, i)) for i in range(g.k)))


def pair(c: EpsCost):
    return (c.a, c.b)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_analysis_matches_oracle(seed):
    g = small_game(seed, max_vertices=4, max_players=3, directed=seed % 3 == 0)
    an = analyze(g)
    profiles = oracles.all_profiles(g)
    paths = [oracles.path_sets(g, i) for i in range(g.k)]
    ne = {p for p in profiles if oracles.is_ne(g, p, paths)}
    assert {oracles.as_sets(p) for p in an.nash} == ne
    best = min(oracles.social(g, p) for p in profiles)
    assert pair(an.optima.value) == best == oracles.steiner_forest_cost(g)
    assert {oracles.as_sets(p) for p in an.optima} == {p for p in profiles if oracles.social(g, p) == best}
    phi_min = min(oracles.potential(g, p) for p in profiles)
    assert {oracles.as_sets(p) for p in an.potential_minima} == {
        p for p in profiles if oracles.potential(g, p) == phi_min
    }
    ne_costs = [oracles.social(g, p) for p in ne]
    assert pair(an.nash_cost_min) == min(ne_costs)
    assert pair(an.nash_cost_max) == max(ne_costs)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_best_response_matches_path_scan(seed):
    g = small_game(seed, max_vertices=5, max_players=4, directed=seed % 2 == 0)
    prof = random_profile(g, random.Random(seed))
    for i in range(g.k):
        br = best_response(g, prof, i)
        scan = min(player_cost(g, prof.replace(i, p), i) for p in enumerate_simple_paths(g, i))
        assert br.cost == scan
        assert player_cost(g, prof.replace(i, br.path), i) == br.cost


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_exact_potential_identity(seed):
    g = small_game(seed, max_players=4)
    rng = random.Random(seed)
    prof = random_profile(g, rng)
    i = rng.randrange(g.k)
    alt = rng.choice(enumerate_simple_paths(g, i))
    moved = prof.replace(i, alt)
    assert potential(g, moved) - potential(g, prof) == player_cost(g, moved, i) - player_cost(g, prof, i)


def test_is_nash_small():
    g = Game.build(3, [(0, 1, 1), (1, 2, 1), (0, 2, 3)], [(0, 2), (1, 2)])
    assert is_nash(g, profile_of(g, [[0, 1], [1]]))
    assert not is_nash(g, profile_of(g, [[2], [1]]))


def test_fig_a_optimum_is_stable(fig_a):
    an = analyze(fig_a)
    o = an.optima.profiles[0]
    trace = best_response_dynamics(fig_a, o)
    assert trace.steps == () and trace.terminal == o


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_dynamics_descend_the_potential(seed):
    g = small_game(seed, max_players=4)
    start = random_profile(g, random.Random(seed))
    for schedule in ("round-robin", "random"):
        trace = best_response_dynamics(g, start, schedule, seed=seed)
        assert is_nash(g, trace.terminal)
        phi = potential(g, start)
        for step in trace.steps:
            assert step.delta_cost < EpsCost.zero()
            assert step.potential_after - phi == step.delta_cost
            phi = step.potential_after
        again = best_response_dynamics(g, start, schedule, seed=seed)
        assert again == trace


def test_dynamics_budget():
    g = Game.build(3, [(0, 1, 1), (1, 2, 1), (0, 2, 3)], [(0, 2), (1, 2)])
    start = profile_of(g, [[2], [1]])
    with pytest.raises(BudgetError):
        best_response_dynamics(g, start, max_steps=0)
    with pytest.raises(ValueError):
        best_response_dynamics(g, start, schedule="sometimes")


def test_profile_budget():
    g = Game.build(2, [(0, 1, 1)] * 5, [(0, 1)] * 3)
    with pytest.raises(ExplosionError) as exc:
        analyze(g, budget=100)
    assert exc.value.count == 125


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_optima_are_forests(seed):
    g = small_game(seed, max_players=4)
    for o in analyze(g).optima:
        assert is_forest(g, used_edges(o))


def test_parallel_evaluation_matches_serial():
    g = small_game(12345, max_vertices=6, max_players=4, min_players=4)
    space = ProfileSpace(g)
    one = evaluate_space(space, 1)
    two = evaluate_space(space, 2)
    for field in ("nash", "optima", "potential_minima", "optimum_value", "nash_cost_min", "nash_cost_max"):
        assert getattr(one, field) == getattr(two, field)


def test_engine_handles_big_costs():
    # Large numerators push the packed encoding past int64 into object arrays.
    big = 10**15
    g = Game.build(3, [(0, 1, (big, 1)), (1, 2, big + 1), (0, 2, (2 * big, 3))], [(0, 2), (1, 2), (0, 1)])
    space = ProfileSpace(g)
    ev = space.evaluate()
    assert ev.encoding.dtype is object
    oracle_best = oracles.steiner_forest_cost(g)
    assert pair(ev.optimum_value) == oracle_best
    assert social_cost(g, space.profile(ev.optima[0])) == ev.optimum_value
