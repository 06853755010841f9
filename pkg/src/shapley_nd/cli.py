"""Command-line front end: ``shapley-nd <command> [options]``.

Reports are JSON (schema 1) on stdout; exact values carry integer
numerator/denominator fields and decimals are for reading only. Exit codes:
0 success, 2 input error, 3 budget or explosion, 4 internal invariant
violation (witness on stderr).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import report as rj
from .bounds import (
    gap_factor,
    hk_minus1_check,
    lemma1_check,
    lemma1_factor,
    lemma2_check,
    ratios,
    shared_by_all,
    theorem_bound,
    theorem_check,
)
from .equilibria import analyze, best_response_dynamics, is_nash
from .errors import (
    BudgetError,
    DegenerateError,
    ExplosionError,
    InputError,
    InvariantViolation,
    NoPathError,
    ReconstructionError,
    StructureError,
)
from .exact import harmonic
from .game import DEFAULT_PATH_CAP, StrategyProfile, enumerate_simple_paths, require_valid, social_cost
from .instances import digest, parse_instance, serialize_instance
from .space import DEFAULT_PROFILE_BUDGET

BUNDLED = "bundled:"


def bundled_names() -> list[str]:
    root = resources.files("shapley_nd") / "data"
    return sorted(p.name[: -len(".txt")] for p in root.iterdir() if p.name.endswith(".txt"))


def read_instance_text(ref: str) -> str:
    """A file path, or ``bundled:<name>`` for an instance shipped with the package."""
    if ref.startswith(BUNDLED):
        name = ref[len(BUNDLED):]
        if name not in bundled_names():
            raise InputError(f"no bundled instance {name!r}; have {', '.join(bundled_names())}")
        return (resources.files("shapley_nd") / "data" / f"{name}.txt").read_text(encoding="utf-8")
    try:
        return Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read instance {ref!r}: {exc.strerror}") from None


def load(ref: str):
    game, meta = parse_instance(read_instance_text(ref))
    require_valid(game)
    return game, meta


def _instance_block(game, meta=None) -> dict:
    return {
        "digest": digest(game),
        "name": game.name,
        "vertices": game.vertex_count,
        "edges": game.m,
        "players": game.k,
        "directed": game.directed,
        "notes": list(meta["notes"]) if meta else [],
    }


# ---------------------------------------------------------------------------
# commands; each returns (results, game or None, meta or None)


def cmd_analyze(args):
    game, meta = load(args.instance)
    an = analyze(game, args.max_paths, args.budget, args.workers)
    res = {
        "profiles": an.evaluation.space.size,
        "paths_per_player": list(an.evaluation.space.shape),
        "nash_count": len(an.nash),
        "potential_minimum_count": len(an.potential_minima),
        "optimum_count": len(an.optima),
        "optimum": {"cost": rj.eps_cost(an.optima.value), "witness": rj.profile(an.optima.profiles[0])},
        "potential_minimum": {
            "potential": rj.eps_cost(an.potential_minima.value),
            "witness": rj.profile(an.potential_minima.profiles[0]),
        },
    }
    try:
        r = ratios(game, args.max_paths, args.budget)
    except DegenerateError as exc:
        res["ratios"] = None
        res["ratios_note"] = str(exc)
    else:
        res["ratios"] = {
            "pos": {**rj.ratio(r.pos), "witness": rj.profile(r.best_nash)},
            "poa": {**rj.ratio(r.poa), "witness": rj.profile(r.worst_nash)},
            "popos": {**rj.ratio(r.popos), "witness": rj.profile(r.best_potential_minimum)},
            "popoa": {**rj.ratio(r.popoa), "witness": rj.profile(r.worst_potential_minimum)},
        }
        if not r.chain_holds():
            raise InvariantViolation("pos <= popos <= popoa <= poa fails", res["ratios"])
    return res, game, meta


def cmd_bounds(args):
    k = args.k
    if k < 2:
        raise InputError("--k must be at least 2")
    f = theorem_bound(k)
    return {
        "k": k,
        "theorem_bound": rj.rational(f),
        "harmonic": rj.rational(harmonic(k)),
        "gap_factor": rj.rational(gap_factor(k)),
        "lemma1_factor": rj.rational(lemma1_factor(k)),
        "below_harmonic": f < harmonic(k),
    }, None, None


def _start_profile(game, how: str, seed: int, cap: int) -> StrategyProfile:
    if how == "optimum":
        return analyze(game, cap).optima.profiles[0]
    paths = [enumerate_simple_paths(game, i, cap) for i in range(game.k)]
    if how == "canonical":
        return StrategyProfile(tuple(p[0] for p in paths))
    rng = random.Random(seed)
    return StrategyProfile(tuple(rng.choice(p) for p in paths))


def cmd_dynamics(args):
    game, meta = load(args.instance)
    start = _start_profile(game, args.start, args.seed, args.max_paths)
    trace = best_response_dynamics(game, start, args.schedule, args.seed, args.max_steps)
    if not is_nash(game, trace.terminal):
        raise InvariantViolation("dynamics stopped outside a Nash equilibrium", rj.profile(trace.terminal))
    return {
        "start": rj.profile(trace.start),
        "steps": [
            {
                "player": s.player,
                "from": rj.path(s.old_path),
                "to": rj.path(s.new_path),
                "delta_cost": rj.eps_cost(s.delta_cost),
                "potential_after": rj.eps_cost(s.potential_after),
            }
            for s in trace.steps
        ],
        "step_count": len(trace.steps),
        "terminal": rj.profile(trace.terminal),
        "terminal_cost": rj.eps_cost(social_cost(game, trace.terminal)),
        "terminal_is_nash": True,
    }, game, meta


def _check_lemma1(game, an):
    verdicts = []
    applicable = False
    for O in an.optima.profiles:
        if not shared_by_all(game, O) or game.directed:
            continue
        applicable = True
        for N in an.nash.profiles:
            rep = lemma1_check(game, N, O, optimum_value=an.optima.value, check=False)
            verdicts.append({
                "optimum": rj.profile(O),
                "equilibrium": rj.profile(N),
                "lhs": rj.eps_cost(rep.lhs),
                "rhs": rj.eps_cost(rep.rhs),
                "factor": rj.rational(rep.factor),
                "deviation_lhs": rj.eps_cost(rep.deviation_lhs),
                "deviation_q_total": rj.eps_cost(rep.deviation_q_total),
                "deviation_q_bound": rj.eps_cost(rep.deviation_q_bound),
                "holds": rep.holds,
            })
    if not applicable:
        reason = "directed game" if game.directed else "O^k empty"
        return {"applicable": False, "note": f"not applicable: {reason}", "holds": True, "pairs": []}
    return {"applicable": True, "holds": all(v["holds"] for v in verdicts), "pairs": verdicts}


def _check_lemma2(game, an):
    verdicts = []
    for O in an.optima.profiles:
        for N in an.potential_minima.profiles:
            rep = lemma2_check(game, N, O)
            verdicts.append({
                "optimum": rj.profile(O),
                "potential_minimum": rj.profile(N),
                "beta": rj.rational(rep.beta),
                "bound": rj.rational(rep.bound),
                "potential_antecedent": rep.potential_antecedent,
                "beta_antecedent": rep.beta_antecedent,
                "conclusion": rep.conclusion,
                "holds": rep.holds,
            })
    return {"applicable": True, "holds": all(v["holds"] for v in verdicts), "pairs": verdicts}


def _check_hk1(game, an):
    verdicts = []
    for O in an.optima.profiles:
        if shared_by_all(game, O):
            continue
        for N in an.potential_minima.profiles:
            rep = hk_minus1_check(game, N, O)
            verdicts.append({
                "optimum": rj.profile(O),
                "potential_minimum": rj.profile(N),
                "coefficient": rj.rational(rep.coefficient),
                "cost_n": rj.eps_cost(rep.cost_n),
                "cost_o": rj.eps_cost(rep.cost_o),
                "holds": rep.holds,
            })
    if not verdicts:
        return {"applicable": False, "note": "not applicable: every optimum has an edge used by all players",
                "holds": True, "pairs": []}
    return {"applicable": True, "holds": all(v["holds"] for v in verdicts), "pairs": verdicts}


def _check_theorem(game, args):
    rep = theorem_check(game, args.max_paths, args.budget)
    return {
        "applicable": True,
        "k": rep.k,
        "bound": rj.rational(rep.bound),
        "holds": rep.holds,
        "worst_ratio": rj.ratio(rep.worst) if rep.worst is not None else None,
        "pairs": [
            {"potential_minimum": rj.profile(N), "optimum": rj.profile(O), "main": main, **branch}
            for N, O, main, branch in rep.pairs
        ],
    }


def cmd_check(args):
    if args.sweep is not None:
        from .sweep import summarize, sweep

        verdicts = sweep(args.sweep, args.seed, args.workers, args.max_vertices, args.max_players)
        summary = summarize(verdicts)
        failed = sorted({i for n, s in summary.items() if isinstance(s, dict) for i in s["failed"]})
        return {"sweep": args.sweep, "seed": args.seed, "checks": summary, "failed_instances": failed,
                "holds": not failed}, None, None
    if args.instance is None or args.lemma is None:
        raise InputError("check needs --instance with --lemma, or --sweep")
    game, meta = load(args.instance)
    if game.k < 2:
        raise InputError("the lemmas need at least two players")
    if args.lemma == "theorem":
        return {"lemma": "theorem", **_check_theorem(game, args)}, game, meta
    an = analyze(game, args.max_paths, args.budget)
    fn = {"1": _check_lemma1, "2": _check_lemma2, "hk1": _check_hk1}[args.lemma]
    return {"lemma": args.lemma, **fn(game, an)}, game, meta


def cmd_generate(args):
    from .families import directed_hk_family, fig_a_claims, fig_b_claims, reconstruct_fig_a, reconstruct_fig_b

    notes: list[str] = []
    res: dict = {"family": args.family}
    if args.family == "directed-hk":
        if args.k is None or args.k < 2:
            raise InputError("--k must be at least 2 for directed-hk")
        game = directed_hk_family(args.k)
        notes.append(f"generated: directed tight family, k={args.k}")
    elif args.family == "fig-a":
        game = reconstruct_fig_a()
        claims = fig_a_claims(game)
        res["claims"] = claims.claims
        notes.append("constraint-matched reconstruction; every numeric claim verified exactly")
    else:
        rep = reconstruct_fig_b(budget=args.budget, seed=args.seed)
        res.update({
            "best_effort": True,
            "matched": rep.matched,
            "unique_nash": rep.unique,
            "floor_met": rep.floor_met,
            "pos": rj.rational(rep.pos) if rep.pos is not None else None,
            "evaluations": rep.evaluations,
            "rounds": rep.rounds,
        })
        if rep.game is None:
            raise ReconstructionError(f"no unique-equilibrium instance within {rep.evaluations} evaluations")
        game = rep.game
        res["claims"] = fig_b_claims(game).claims
        verdict = "matched 1769/1126" if rep.matched else f"best pos {rep.pos}"
        notes.append(f"searched: seed {args.seed}, {rep.evaluations} exact evaluations, {verdict}")
    text = serialize_instance(game, notes)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    res["instance_text"] = text
    return res, game, {"notes": notes}


def cmd_search(args):
    from .search import result_instance_text, search_costs, spec_from_json

    try:
        raw = Path(args.spec).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read spec {args.spec!r}: {exc.strerror}") from None
    spec = spec_from_json(raw, base_dir=Path(args.spec).parent)
    if args.seed is not None:
        spec.seed = args.seed
    if args.budget is not None:
        if args.budget < 1:
            raise InputError("--budget must be at least 1")
        spec.budget = args.budget
    result = search_costs(spec)
    m = result.measured
    text = result_instance_text(result, spec.seed)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    res = {
        "objective": spec.objective,
        "seed": spec.seed,
        "budget": spec.budget,
        "evaluations": result.evaluations,
        "matched": result.matched,
        "score": [str(x) for x in result.score],
        "trace": [{"evaluations": n, "score": s} for n, s in result.trace],
        "instance_text": text,
    }
    if m is not None:
        res["best"] = {
            "costs": [rj.eps_cost(c) for c in m.costs],
            "nash_count": m.nash_count,
            "pos": rj.ratio(m.pos),
            "poa": rj.ratio(m.poa),
            "popos": rj.ratio(m.popos),
            "popoa": rj.ratio(m.popoa),
            "opt_cost": rj.eps_cost(m.opt_cost),
            "nash_cost": rj.eps_cost(m.nash_cost),
        }
    return res, result.game, None


COMMANDS = {
    "analyze": cmd_analyze,
    "bounds": cmd_bounds,
    "dynamics": cmd_dynamics,
    "check": cmd_check,
    "generate": cmd_generate,
    "search": cmd_search,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shapley-nd", description="Exact analysis of Shapley network design games.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True):
        if instance:
            sp.add_argument("--instance", required=True, help="instance file, or bundled:<name>")
        sp.add_argument("--max-paths", type=int, default=DEFAULT_PATH_CAP, help="simple paths per player")
        sp.add_argument("--budget", type=int, default=DEFAULT_PROFILE_BUDGET, help="strategy profiles")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")

    a = sub.add_parser("analyze", help="equilibria, optimum and the four ratios")
    common(a)
    a.add_argument("--workers", type=int, default=1)

    b = sub.add_parser("bounds", help="closed-form bound for k players")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--format", choices=("json", "text"), default="json")
    b.add_argument("--timing", action="store_true")

    d = sub.add_parser("dynamics", help="best-response dynamics trace")
    common(d)
    d.add_argument("--start", choices=("canonical", "random", "optimum"), default="canonical")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--schedule", choices=("round-robin", "random"), default="round-robin")
    d.add_argument("--max-steps", type=int, default=10_000)

    c = sub.add_parser("check", help="verify a lemma on one instance, or sweep random instances")
    c.add_argument("--instance", help="instance file, or bundled:<name>")
    c.add_argument("--lemma", choices=("1", "2", "hk1", "theorem"))
    c.add_argument("--sweep", type=int, help="number of random instances")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--max-vertices", type=int, default=5)
    c.add_argument("--max-players", type=int, default=3)
    c.add_argument("--max-paths", type=int, default=DEFAULT_PATH_CAP)
    c.add_argument("--budget", type=int, default=DEFAULT_PROFILE_BUDGET)
    c.add_argument("--format", choices=("json", "text"), default="json")
    c.add_argument("--timing", action="store_true")

    g = sub.add_parser("generate", help="write a family member or a reconstruction")
    g.add_argument("--family", choices=("directed-hk", "fig-a", "fig-b"), required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--out")
    g.add_argument("--seed", type=int, default=0, help="fig-b search seed")
    g.add_argument("--budget", type=int, default=10**6, help="fig-b exact evaluations")
    g.add_argument("--format", choices=("json", "text"), default="json")
    g.add_argument("--timing", action="store_true")

    s = sub.add_parser("search", help="seeded cost search")
    s.add_argument("--spec", required=True, help="JSON search spec")
    s.add_argument("--seed", type=int)
    s.add_argument("--budget", type=int)
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.add_argument("--timing", action="store_true")
    return p


def _echo(args) -> dict:
    skip = {"command", "format", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _fmt_exact(d: dict):
    if "eps_num" in d:
        a = Fraction(d["num"], d["den"])
        b = Fraction(d["eps_num"], d["eps_den"])
        return f"{a}+{b}*eps" if b else str(a)
    if "direction" in d:
        sign = {1: " (from above)", -1: " (from below)", 0: ""}[d["direction"]]
        return f"{Fraction(d['num'], d['den'])}{sign}"
    return str(Fraction(d["num"], d["den"]))


def render_text(obj, prefix="") -> list[str]:
    """Flat ``key: value`` lines; exact values shown as fractions."""
    lines = []
    if isinstance(obj, dict):
        if "num" in obj and "den" in obj:
            return [f"{prefix}: {_fmt_exact(obj)}"]
        for k, v in obj.items():
            if k == "instance_text":
                continue
            lines += render_text(v, f"{prefix}.{k}" if prefix else k)
    elif isinstance(obj, list) and any(isinstance(x, dict) for x in obj):
        for j, v in enumerate(obj):
            lines += render_text(v, f"{prefix}[{j}]")
    else:
        lines.append(f"{prefix}: {json.dumps(obj)}")
    return lines


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        results, game, meta = COMMANDS[args.command](args)
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        print(rj.to_json({"schema": rj.SCHEMA, "witness": exc.witness}), file=sys.stderr, end="")
        return 4
    except StructureError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 4
    except (InputError, NoPathError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ExplosionError, BudgetError, ReconstructionError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    out = {"schema": rj.SCHEMA, "command": {"name": args.command, "args": _echo(args)}, "results": results}
    if game is not None:
        out["instance"] = _instance_block(game, meta)
    if args.timing:
        out["timing_seconds"] = round(time.perf_counter() - t0, 3)
    if args.format == "text":
        sys.stdout.write("\n".join(render_text(out)) + "\n")
    else:
        sys.stdout.write(rj.to_json(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
