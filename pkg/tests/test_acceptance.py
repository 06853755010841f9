"""One test per acceptance criterion, each printing a PASS/FAIL line.

Run alone with ``python tests/test_acceptance.py`` or ``pytest tests/test_acceptance.py``;
the lines appear in the "acceptance criteria" section of the pytest summary.
"""

import json
import random
import sys
import time
from contextlib import contextmanager, redirect_stdout
from fractions import Fraction
from io import StringIO

import pytest

from conftest import record_acceptance, small_game
from shapley_nd.bounds import gap_factor, ratios, theorem_bound
from shapley_nd.cli import main
from shapley_nd.equilibria import analyze, best_response, is_forest
from shapley_nd.exact import harmonic
from shapley_nd.families import (
    FIG_B_FLOOR,
    directed_hk_family,
    fig_a_claims,
    fig_b_claims,
    reconstruct_fig_a,
    reconstruct_fig_b,
)
from shapley_nd.game import StrategyProfile, enumerate_simple_paths, player_cost, potential, used_edges
from shapley_nd.sweep import summarize, sweep


@contextmanager
def criterion(number, title, limit=None):
    """Record PASS only if the body finishes without error and inside ``limit`` seconds."""
    t0 = time.perf_counter()
    detail = {}
    try:
        yield detail
    except BaseException as exc:
        record_acceptance(f"[FAIL] {number}. {title}: {type(exc).__name__}: {exc}"[:300])
        raise
    took = time.perf_counter() - t0
    extra = ", ".join(f"{k}={v}" for k, v in detail.items())
    suffix = f" ({took:.1f}s{', ' + extra if extra else ''})"
    if limit is not None and took >= limit:
        record_acceptance(f"[FAIL] {number}. {title}: over {limit}s{suffix}")
        pytest.fail(f"criterion {number} took {took:.1f}s, limit {limit}s")
    record_acceptance(f"[PASS] {number}. {title}{suffix}")


def random_profile(g, rng):
    return StrategyProfile(tuple(rng.choice(enumerate_simple_paths(g, i)) for i in range(g.k)))


def assert_acyclic_optima(game, an=None):
    if game.directed:
        return
    an = an or analyze(game)
    for o in an.optima:
        assert is_forest(game, used_edges(o))


@pytest.fixture(scope="module")
def sweep_summary():
    t0 = time.perf_counter()
    verdicts = sweep(120, seed=2024, max_vertices=5, max_players=3, min_players=2)
    return verdicts, summarize(verdicts), time.perf_counter() - t0


def test_c1_closed_forms():
    with criterion(1, "closed-form bound f(k)", limit=1) as d:
        assert theorem_bound(2) == Fraction(4, 3)
        assert theorem_bound(3) == Fraction(165, 92)
        assert all(theorem_bound(k) < harmonic(k) for k in range(2, 51))
        scaled = 100**4 * gap_factor(100)
        assert Fraction(18, 10) <= scaled <= Fraction(22, 10)
        d["k^4 gap at 100"] = f"{float(scaled):.4f}"


def test_c2_exact_potential_identity():
    with criterion(2, "exact potential identity", limit=30) as d:
        rng = random.Random(2)
        n = 0
        for seed in range(500):
            g = small_game(seed, max_vertices=5, max_players=4)
            prof = random_profile(g, rng)
            i = rng.randrange(g.k)
            moved = prof.replace(i, rng.choice(enumerate_simple_paths(g, i)))
            assert potential(g, moved) - potential(g, prof) == player_cost(g, moved, i) - player_cost(g, prof, i)
            n += 1
        d["triples"] = n


def test_c3_potential_minimum_sanity(sweep_summary):
    with criterion(3, "potential minima are NE, ratio chain, H_k bound", limit=300) as d:
        verdicts, summary, took = sweep_summary
        assert len(verdicts) >= 100 and took < 300
        for name in ("potential minima are Nash", "ratio chain", "H_k bound"):
            assert summary[name]["failed"] == [], (name, summary[name])
        d["instances"] = len(verdicts)
        d["sweep seconds"] = f"{took:.1f}"


def test_c4_theorem_per_instance(sweep_summary):
    with criterion(4, "theorem bound, lemma 1, deviation certificates", limit=300) as d:
        verdicts, summary, _ = sweep_summary
        for name in ("theorem bound", "lemma 1", "deviation paths", "lemma 2", "H_(k-1) branch"):
            assert summary[name]["failed"] == [], (name, summary[name])
        assert summary["lemma1_applicable_instances"] > 0
        d["lemma 1 applicable"] = summary["lemma1_applicable_instances"]


def test_c5_best_response_oracle():
    with criterion(5, "best response equals brute-force path scan") as d:
        checks = 0
        for seed in range(200):
            g = small_game(10_000 + seed, max_vertices=5, max_players=4, directed=seed % 2 == 1)
            prof = random_profile(g, random.Random(seed))
            for i in range(g.k):
                scan = min(player_cost(g, prof.replace(i, p), i) for p in enumerate_simple_paths(g, i))
                assert best_response(g, prof, i).cost == scan
                checks += 1
        d["instances"] = 200
        d["player checks"] = checks


def test_c6_directed_family():
    with criterion(6, "directed family reaches H_k", limit=60):
        for k, h in ((2, Fraction(3, 2)), (3, Fraction(11, 6)), (4, Fraction(25, 12))):
            assert ratios(directed_hk_family(k)).pos.limit == h


def test_c7_fig_a():
    with criterion(7, "286/175 reconstruction", limit=60):
        g = reconstruct_fig_a()
        rep = fig_a_claims(g)
        assert rep.all_hold, rep.claims
        r = ratios(g)
        assert r.pos.limit == 1
        assert r.popos.limit == r.popoa.limit == Fraction(286, 175)
        assert_acyclic_optima(g)


@pytest.mark.slow
def test_c8_fig_b():
    with criterion(8, "1769/1126 reconstruction (best effort)") as d:
        rep = reconstruct_fig_b()
        d["evaluations"] = rep.evaluations
        d["pos"] = rep.pos
        d["exact 1769/1126 matched"] = rep.matched
        assert rep.game is not None
        an = analyze(rep.game)
        assert rep.game.k == 3 and rep.game.vertex_count == 5
        assert len(an.nash) == 1
        assert rep.pos >= FIG_B_FLOOR
        assert_acyclic_optima(rep.game, an)
        if rep.matched:
            assert fig_b_claims(rep.game).all_hold


def cli(*argv):
    buf = StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    assert code == 0
    return buf.getvalue()


def test_c9_determinism(tmp_path):
    with criterion(9, "byte-identical reports") as d:
        spec = tmp_path / "spec.json"
        (tmp_path / "g.txt").write_text(
            "vertices: 4\nedge 0 2 0 1\nedge 1 2 0 1\nedge 2 3 3\nedge 0 3 1\nedge 1 3 2\nplayer 0 3\nplayer 1 3\n"
        )
        spec.write_text(json.dumps({"instance_file": "g.txt", "slots": {"0": [0, 20], "2": [1, 20]},
                                    "objective": "maximize-pos", "budget": 80, "seed": 1}))
        commands = [
            ("analyze", "--instance", "bundled:fig-a"),
            ("bounds", "--k", "5"),
            ("dynamics", "--instance", "bundled:fig-a", "--start", "random", "--seed", "4", "--schedule", "random"),
            ("check", "--instance", "bundled:fig-a", "--lemma", "2"),
            ("generate", "--family", "fig-b", "--budget", "300", "--seed", "2"),
            ("search", "--spec", str(spec)),
        ]
        for argv in commands:
            assert cli(*argv) == cli(*argv), argv
        serial = cli("check", "--sweep", "20", "--seed", "9", "--workers", "1")
        parallel = cli("check", "--sweep", "20", "--seed", "9", "--workers", "2")
        assert serial.replace('"workers": 1', '"workers": 2') == parallel
        d["commands"] = len(commands) + 1


def test_c10_acyclic_optima(sweep_summary):
    with criterion(10, "optima are forests") as d:
        verdicts, summary, _ = sweep_summary
        assert summary["optima acyclic"]["failed"] == []
        for g in (reconstruct_fig_a(), directed_hk_family(3)):
            assert_acyclic_optima(g)
        d["instances"] = summary["optima acyclic"]["checked"] + 2


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
