"""JSON encoding of exact values and report objects."""

from __future__ import annotations

import json
from decimal import Decimal, localcontext
from fractions import Fraction

from .exact import EpsCost, Ratio
from .game import Path, StrategyProfile

SCHEMA = 1


def _decimal(q: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 12
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def rational(q) -> dict:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator, "decimal": _decimal(q)}


def eps_cost(c: EpsCost) -> dict:
    return {
        "num": c.a.numerator,
        "den": c.a.denominator,
        "eps_num": c.b.numerator,
        "eps_den": c.b.denominator,
        "decimal": _decimal(c.a),
    }


def ratio(r: Ratio) -> dict:
    lim = r.limit
    return {
        "num": lim.numerator,
        "den": lim.denominator,
        "direction": r.direction,
        "decimal": _decimal(lim),
        "exact_numerator": eps_cost(r.num),
        "exact_denominator": eps_cost(r.den),
    }


def path(p: Path) -> list[int]:
    return list(p.edges)


def profile(p: StrategyProfile) -> list[list[int]]:
    return [list(x.edges) for x in p.paths]


def to_json(obj) -> str:
    """Deterministic rendering: sorted keys, fixed separators."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
