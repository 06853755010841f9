import pytest
from hypothesis import given, settings

from conftest import seeds, small_game
from shapley_nd.cli import bundled_names, read_instance_text
from shapley_nd.errors import ParseError
from shapley_nd.exact import EpsCost
from shapley_nd.game import validate_game
from shapley_nd.instances import digest, load_game, parse_instance, serialize_instance

MINIMAL = """\
vertices: 2
edge 0 1 1
player 0 1
"""


def test_minimal_file():
    g = load_game(MINIMAL)
    assert g.vertex_count == 2 and g.k == 1 and g.edges[0].cost == EpsCost(1)
    assert not g.directed and validate_game(g) == []


def test_rationals_eps_and_metadata():
    text = "# header comment\nname: demo\nnote: hand made\ndirected: true\nvertices: 3\n" \
           "edge 0 1 1/2 3\nedge 1 2 0 1\nplayer 0 2\n"
    g, meta = parse_instance(text)
    assert g.directed and g.name == "demo"
    assert meta["notes"] == ["hand made"]
    assert g.edges[0].cost == EpsCost("1/2", 3)
    assert g.edges[1].cost == EpsCost(0, 1)


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("vertices: 2\ndirected: true\ndirected: false\n", 3, "duplicate directed"),
        ("vertices: 2\nedge 0 1\n", 2, "edge needs"),
        ("vertices: 2\nedge 0 1 x\n", 2, "expected integer or p/q"),
        ("vertices: 2\nedge 0 1 1/0\n", 2, "zero denominator"),
        ("vertices: 2\nwire 0 1\n", 2, "unknown record"),
        ("edge 0 1 1\n", 2, "missing vertices"),
        ("vertices: 2\ndirected: maybe\n", 2, "directed must be"),
    ],
)
def test_parse_errors(text, line, fragment):
    with pytest.raises(ParseError) as exc:
        parse_instance(text)
    assert exc.value.line == line
    assert fragment in exc.value.reason


def test_error_column_points_at_token():
    with pytest.raises(ParseError) as exc:
        parse_instance("vertices: 2\nedge 0 1 abc\n")
    assert exc.value.column == 10


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_round_trip(seed):
    g = small_game(seed, directed=seed % 2 == 1).renamed(f"g{seed}")
    text = serialize_instance(g, ["a note"])
    back, meta = parse_instance(text)
    assert back == g
    assert meta["notes"] == ["a note"]
    assert serialize_instance(back, ["a note"]) == text


def test_digest_ignores_name():
    g = load_game(MINIMAL)
    assert digest(g) == digest(g.renamed("other"))
    assert digest(g) != digest(g.with_costs([EpsCost(2)]))


@pytest.mark.parametrize("name", bundled_names())
def test_bundled_instances_are_valid_and_round_trip(name):
    text = read_instance_text(f"bundled:{name}")
    g, meta = parse_instance(text)
    assert validate_game(g) == []
    assert serialize_instance(g, meta["notes"]) == text
