import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from minkowski import (EllipsoidalNorm, EuclideanNorm, Functional, Hyperplane, WeightedPNorm,
                       birkhoff_vh, birkhoff_vv, left_orthogonal_direction, legendre)
from minkowski.birkhoff import line_search_gap
from minkowski.linesearch import convex_line_search, golden_section

from conftest import norm_and_dim, vectors


def brent_gap(N, x, y):
    """||x|| - min_t ||x + t y|| from scipy's bounded scalar minimiser."""
    nx = float(N.evaluate(x))
    T = 2 * nx / float(N.evaluate(y))
    r = minimize_scalar(lambda t: float(N.evaluate(x + t * y)), bounds=(-T, T), method="bounded",
                        options={"xatol": 1e-12})
    return nx - min(r.fun, nx)


def test_vector_examples():
    assert birkhoff_vv(EuclideanNorm(2), [1, 0], [0, 1]).holds
    N = WeightedPNorm(4, [1, 1])
    rep = birkhoff_vv(N, [1, 1], [1, -1])
    assert rep.holds
    assert brent_gap(N, np.array([1.0, 1.0]), np.array([1.0, -1.0])) < 1e-12
    bad = birkhoff_vv(EuclideanNorm(2), [1, 0], [1, 1])
    assert not bad.holds and bad.witness_t < 0 and bad.line_search_gap > 0


def test_zero_vector_is_rejected():
    with pytest.raises(ValueError):
        birkhoff_vv(EuclideanNorm(2), [0, 0], [1, 0])


def test_hyperplane_examples():
    E3 = EuclideanNorm(3)
    assert birkhoff_vh(E3, [0, 0, 1], Hyperplane.spanned_by([[1, 0, 0], [0, 1, 0]])).holds
    assert birkhoff_vh(WeightedPNorm(4, [1, 1]), [1, 1], Hyperplane.spanned_by([[1, -1]])).holds
    assert not birkhoff_vh(EuclideanNorm(2), [1, 0], Hyperplane.spanned_by([[1, 1]])).holds


def test_left_orthogonal_direction_examples():
    h = Hyperplane(Functional([0, 1]))
    assert np.allclose(left_orthogonal_direction(EuclideanNorm(2), h), [0, 1])
    N = WeightedPNorm(4, [1, 1])
    x = left_orthogonal_direction(N, Hyperplane(Functional([1, 1])))
    assert np.allclose(x, np.array([1, 1]) / 2 ** 0.25)
    assert birkhoff_vh(N, x, Hyperplane(Functional([1, 1]))).holds
    A = np.diag([1.0, 4.0])
    x = left_orthogonal_direction(EllipsoidalNorm(A), Hyperplane.spanned_by([[1, 0]]))
    ref = np.linalg.solve(A, [0, 1])
    ref /= np.sqrt(ref @ A @ ref)
    assert np.allclose(np.abs(x), np.abs(ref))
    # the line search agrees: no point of x + t(1, 0) is shorter
    assert brent_gap(EllipsoidalNorm(A), x, np.array([1.0, 0.0])) < 1e-12


@given(norm_and_dim(), st.data())
def test_algebraic_and_variational_tests_agree(Nd, data):
    N, n = Nd
    x = data.draw(vectors(n))
    y = data.draw(vectors(n))
    # project y onto ker L(x) half the time, so that orthogonal pairs occur
    if data.draw(st.booleans()):
        c = legendre(N, x).coeffs
        y = y - (c @ y) / (c @ x) * x
        if np.max(np.abs(y)) < 1e-6:
            return
    rep = birkhoff_vv(N, x, y)
    gap = brent_gap(N, x, y)
    if rep.holds:
        assert gap < 1e-9 * float(N.evaluate(x))
    else:
        assert gap > 0


def test_line_search_gap_matches_brent():
    N = WeightedPNorm(1.5, [1, 2, 1])
    x, y = np.array([1.0, 0.2, -0.4]), np.array([0.5, 1.0, 0.1])
    g, t = line_search_gap(N, x, y)
    assert g == pytest.approx(brent_gap(N, x, y), abs=1e-10)


def test_golden_section_on_a_parabola():
    t, v = golden_section(lambda t: (t - 0.3) ** 2 + 1, -2, 2, xtol=1e-12)
    assert t == pytest.approx(0.3, abs=1e-6) and v == pytest.approx(1)


@pytest.mark.parametrize("root", [0.0, 0.25, 0.999, 1.0])
def test_convex_line_search_roots(root):
    # dphi is nondecreasing; the minimiser on [0, 1] is clip(root)
    g = convex_line_search(lambda t: np.sign(t - root) * abs(t - root) ** 3, 1.0)
    assert g == pytest.approx(root, abs=1e-5)


def test_convex_line_search_with_kinks():
    # derivative of |t - 0.4| + 2|t - 0.7| jumps at the breakpoints
    dphi = lambda t: np.sign(t - 0.4) + 2 * np.sign(t - 0.7)
    g = convex_line_search(dphi, 1.0, breakpoints=np.array([0.4, 0.7]), guess=0.5)
    assert g == pytest.approx(0.7, abs=1e-12)
