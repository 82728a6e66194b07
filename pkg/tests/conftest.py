import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from forest_spectra.graph_core import GeneralizedAdjacencyMatrix

ACCEPTANCE_LINES = []


def mat(rows):
    """Exact matrix from nested lists of ints / strings."""
    return GeneralizedAdjacencyMatrix.from_rows([[Fraction(x) for x in r] for r in rows])


def random_int_matrix(rng, n, lo=-5, hi=5):
    return mat([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])


def random_subgenerator(rng, n, density=0.7):
    """Nonnegative off-diagonals, nonpositive row sums (killing >= 0)."""
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                rows[i][j] = rng.randint(1, 5)
        kill = rng.choice([0, 0, 1, 2, 3])
        rows[i][i] = -kill - sum(rows[i])
    return mat(rows)


@st.composite
def int_matrices(draw, max_n=4, lo=-4, hi=4):
    n = draw(st.integers(1, max_n))
    rows = draw(st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                         min_size=n, max_size=n))
    return mat(rows)


@pytest.fixture
def rng():
    return random.Random(20261016)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
