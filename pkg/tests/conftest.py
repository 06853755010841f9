import random

import pytest
from hypothesis import strategies as st

from shapley_nd.cli import read_instance_text
from shapley_nd.instances import load_game
from shapley_nd.sweep import random_game


def small_game(seed, max_vertices=5, max_players=3, directed=False, min_players=1):
    return random_game(random.Random(seed), max_vertices, max_players, directed=directed, min_players=min_players)


seeds = st.integers(min_value=0, max_value=10**9)


@pytest.fixture(scope="session")
def fig_a():
    return load_game(read_instance_text("bundled:fig-a"))


@pytest.fixture(scope="session")
def fig_b_exact():
    return load_game(read_instance_text("bundled:fig-b-exact"))


_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
