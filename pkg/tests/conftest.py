import numpy as np
import pytest
from hypothesis import settings, strategies as st

from minkowski import EllipsoidalNorm, EuclideanNorm, Polytope, WeightedPNorm

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def builtin_norms(n):
    return [
        EuclideanNorm(n),
        WeightedPNorm(1.5, np.ones(n)),
        WeightedPNorm(4, np.ones(n)),
        EllipsoidalNorm(np.diag((np.arange(n) + 1.0) ** 2)),
    ]


NORM_IDS = ["euclidean", "p1.5", "p4", "ellipsoid"]


@pytest.fixture
def square():
    return Polytope([[1, 1], [1, -1], [-1, 1], [-1, -1]])


@pytest.fixture
def p4():
    return WeightedPNorm(4, np.ones(2))


@pytest.fixture
def euclid2():
    return EuclideanNorm(2)


def vectors(n, lo=-5.0, hi=5.0, nonzero=True):
    s = st.lists(st.floats(lo, hi, allow_nan=False, allow_infinity=False), min_size=n, max_size=n)
    s = s.map(np.array)
    if nonzero:
        s = s.filter(lambda v: np.max(np.abs(v)) > 1e-3)
    return s


@st.composite
def norm_and_dim(draw):
    n = draw(st.sampled_from([2, 3, 5]))
    k = draw(st.integers(0, 3))
    return builtin_norms(n)[k], n


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
