from fractions import Fraction

import pytest

from shapley_nd.bounds import ratios
from shapley_nd.equilibria import analyze
from shapley_nd.exact import EpsCost, harmonic
from shapley_nd.families import (
    FIG_B_FLOOR,
    FIG_B_SKELETONS,
    directed_hk_family,
    fig_a_claims,
    fig_a_potential_terms,
    fig_b_claims,
    fig_b_skeleton,
    reconstruct_fig_a,
    reconstruct_fig_b,
)
from shapley_nd.game import edge_loads, potential


@pytest.mark.parametrize("k", [2, 3, 4])
def test_directed_family_reaches_harmonic(k):
    g = directed_hk_family(k)
    r = ratios(g)
    assert r.pos.limit == harmonic(k)
    an = analyze(g)
    assert len(an.nash) == 1


def test_directed_family_rejects_one_player():
    with pytest.raises(ValueError):
        directed_hk_family(1)


def test_fig_a_reconstruction():
    g = reconstruct_fig_a()
    rep = fig_a_claims(g)
    assert rep.all_hold, rep.claims
    an = analyze(g)
    o = an.optima.profiles[0]
    assert potential(g, o) == EpsCost(1144, Fraction(29, 6))
    assert sorted(edge_loads(o).values()) == [2, 2, 3]


def test_fig_a_itemized_terms():
    t = fig_a_potential_terms(None)
    assert t["optimum"] == EpsCost(1144, Fraction(29, 6))
    assert t["uses shared edge"].a > 1156
    assert t["three on 374 (a)"].a > 1208
    assert t["209/374/396"] > EpsCost(1177)
    assert t["potential minimum"] == EpsCost(1144)


def test_fig_a_claims_reject_wrong_costs(fig_a):
    bad = fig_a.with_costs([EpsCost(1)] * fig_a.m)
    assert not fig_a_claims(bad).all_hold


def test_fig_b_exact_instance(fig_b_exact):
    rep = fig_b_claims(fig_b_exact)
    assert rep.all_hold, rep.claims
    assert ratios(fig_b_exact).pos.limit == Fraction(1769, 1126)


def test_fig_b_claims_on_even_split():
    tree, players = FIG_B_SKELETONS[0]
    rep = fig_b_claims(fig_b_skeleton(tree, players))
    assert rep.claims["direct edges cost 1769"]
    assert not rep.all_hold


def test_fig_b_small_budget_reports_honestly():
    rep = reconstruct_fig_b(budget=400, seed=1, round_budget=200, patience=50)
    assert rep.evaluations <= 400
    if rep.game is not None:
        assert rep.unique
        assert len(analyze(rep.game).nash) == 1
        assert rep.floor_met == (rep.pos > FIG_B_FLOOR)
    if rep.matched:
        assert fig_b_claims(rep.game).all_hold
