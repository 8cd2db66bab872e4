import numpy as np
import pytest

from cyclegap import CycleOperators, ProductSet, load_scenario

# filled by test_acceptance; printed at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def intervals():
    """C_1 = [-1, 1], C_2 = [3, 5] in R^1."""
    sc = load_scenario("two_intervals")
    return sc.ops, sc.product


@pytest.fixture
def singletons():
    sc = load_scenario("three_singletons")
    return sc.ops, sc.product


def pv(*blocks):
    """Product vector from per-block sequences (scalars allowed for n = 1)."""
    return np.array([np.atleast_1d(b) for b in blocks], dtype=float)
