"""Line-oriented instance text format.

::

    # comment
    name: <string>
    directed: true|false
    vertices: <n>
    edge <u> <v> <const> [<eps>]
    player <s> <t>

Edge ids are record order, vertices are 0-based, numbers are integers or
``p/q``. ``note:`` lines carry free-form provenance metadata.
"""

from __future__ import annotations

import hashlib
import re
from fractions import Fraction

from .errors import ParseError
from .exact import EpsCost
from .game import Edge, Game

_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")


def _rational(tok: str, line: int, col: int) -> Fraction:
    if not _RAT.match(tok):
        raise ParseError(line, col, f"expected integer or p/q, got {tok!r}")
    try:
        return Fraction(tok)
    except ZeroDivisionError:
        raise ParseError(line, col, "zero denominator") from None


def _int(tok: str, line: int, col: int) -> int:
    if not re.fullmatch(r"\d+", tok):
        raise ParseError(line, col, f"expected non-negative integer, got {tok!r}")
    return int(tok)


def _tokens(raw: str):
    """(column, token) pairs, columns 1-based."""
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", raw)]


def parse_instance(text: str) -> tuple[Game, dict]:
    """Parse instance text into a Game plus its metadata (name, notes)."""
    headers: dict[str, object] = {}
    notes: list[str] = []
    edges: list[Edge] = []
    players: list[tuple[int, int]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        col0 = raw.index(stripped[0]) + 1
        m = re.match(r"^(name|directed|vertices|note)\s*:\s*(.*)$", stripped)
        if m:
            key, val = m.group(1), m.group(2).strip()
            if key == "note":
                notes.append(val)
                continue
            if key in headers:
                raise ParseError(ln, col0, f"duplicate {key}: header")
            if key == "directed":
                if val not in ("true", "false"):
                    raise ParseError(ln, col0, f"directed must be true or false, got {val!r}")
                headers[key] = val == "true"
            elif key == "vertices":
                headers[key] = _int(val, ln, raw.index(val) + 1 if val else col0)
            else:
                headers[key] = val
            continue
        toks = _tokens(raw)
        kind = toks[0][1]
        if kind == "edge":
            if len(toks) not in (4, 5):
                raise ParseError(ln, col0, "edge needs: edge <u> <v> <const> [<eps>]")
            u = _int(toks[1][1], ln, toks[1][0])
            v = _int(toks[2][1], ln, toks[2][0])
            a = _rational(toks[3][1], ln, toks[3][0])
            b = _rational(toks[4][1], ln, toks[4][0]) if len(toks) == 5 else Fraction(0)
            edges.append(Edge(u, v, EpsCost(a, b)))
        elif kind == "player":
            if len(toks) != 3:
                raise ParseError(ln, col0, "player needs: player <s> <t>")
            players.append((_int(toks[1][1], ln, toks[1][0]), _int(toks[2][1], ln, toks[2][0])))
        else:
            raise ParseError(ln, col0, f"unknown record {kind!r}")
    if "vertices" not in headers:
        raise ParseError(len(text.splitlines()) + 1, 1, "missing vertices: header")
    game = Game(
        headers["vertices"],
        tuple(edges),
        tuple(players),
        bool(headers.get("directed", False)),
        str(headers.get("name", "")),
    )
    return game, {"name": game.name, "notes": notes}


def load_game(text: str) -> Game:
    return parse_instance(text)[0]


def serialize_instance(game: Game, notes=()) -> str:
    lines = []
    if game.name:
        lines.append(f"name: {game.name}")
    for n in notes:
        lines.append(f"note: {n}")
    lines.append(f"directed: {'true' if game.directed else 'false'}")
    lines.append(f"vertices: {game.vertex_count}")
    for e in game.edges:
        rec = f"edge {e.u} {e.v} {e.cost.a}"
        if e.cost.b:
            rec += f" {e.cost.b}"
        lines.append(rec)
    for s, t in game.players:
        lines.append(f"player {s} {t}")
    return "\n".join(lines) + "\n"


def digest(game: Game) -> str:
    """Content hash of the canonical serialization (metadata excluded)."""
    return hashlib.sha256(serialize_instance(game.renamed("")).encode()).hexdigest()
