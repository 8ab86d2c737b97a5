import numpy as np
import pytest
from hypothesis import given, strategies as st

from minkowski import (CustomNorm, EllipsoidalNorm, EuclideanNorm, Functional, LegendrePair,
                       WeightedPNorm, dual_legendre, dual_norm, legendre, legendre_inverse,
                       sphere_sample)
from minkowski.legendre import maximize_on_sphere

from conftest import norm_and_dim, vectors


def test_legendre_examples():
    assert np.array_equal(legendre(EuclideanNorm(2), [3, 4]).coeffs, [3, 4])
    N = WeightedPNorm(4, [1, 1])
    assert np.allclose(legendre(N, [1, 1]).coeffs, 2 ** -0.5, atol=1e-12)
    assert not np.any(legendre(N, [0, 0]).coeffs)


def test_legendre_matches_half_square_derivative():
    # L(x).v = 1/2 d/dt rho(x + t v)^2 at t = 0
    N = WeightedPNorm(4, [1, 1])
    x, v, h = np.array([1.0, 1.0]), np.array([0.3, -1.1]), 1e-6
    q = lambda t: 0.5 * float(N.evaluate(x + t * v)) ** 2
    assert legendre(N, x)(v) == pytest.approx((q(h) - q(-h)) / (2 * h), abs=1e-8)


def test_dual_norm_examples():
    assert dual_norm(EuclideanNorm(2), [3, 4]) == pytest.approx(5)
    N = WeightedPNorm(4, [1, 1])
    assert dual_norm(N, [1, 1]) == pytest.approx(2 ** 0.75, rel=1e-12)
    # dense sphere sample as the oracle
    S = sphere_sample(N, 50000).points
    assert np.max(S @ [1, 1]) == pytest.approx(2 ** 0.75, rel=1e-6)
    assert dual_norm(N, [0, 0]) == 0


def test_inverse_examples():
    assert np.allclose(legendre_inverse(EuclideanNorm(2), [3, 4]), [3, 4])
    N = WeightedPNorm(4, [1, 1])
    assert np.allclose(legendre_inverse(N, legendre(N, [1, 1])), [1, 1], atol=1e-6)
    assert not np.any(legendre_inverse(N, [0, 0]))


@given(norm_and_dim(), st.data())
def test_legendre_properties(Nd, data):
    N, n = Nd
    x = data.draw(vectors(n))
    t = data.draw(st.floats(0.01, 100))
    L = legendre(N, x).coeffs
    nx = float(N.evaluate(x))
    assert np.allclose(legendre(N, t * x).coeffs, t * L, rtol=1e-10, atol=1e-12)
    assert dual_norm(N, L) == pytest.approx(nx, rel=1e-10)
    assert L @ x == pytest.approx(nx * nx, rel=1e-10)
    assert np.allclose(legendre_inverse(N, L), x, rtol=1e-8, atol=1e-10)


@given(norm_and_dim(), st.data())
def test_self_duality(Nd, data):
    # L* = J o L^{-1}: the dual transform of phi evaluates functionals like L^{-1}(phi)
    N, n = Nd
    phi = data.draw(vectors(n))
    psi = data.draw(vectors(n, nonzero=False))
    lhs = dual_legendre(N, Functional(phi))(Functional(psi))
    rhs = Functional(psi)(legendre_inverse(N, phi))
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-9)


def test_numeric_path_for_custom_norm():
    A = np.array([[2.0, 0.5], [0.5, 1.0]])
    C = CustomNorm(2, lambda x: float(np.sqrt(x @ A @ x)))
    E = EllipsoidalNorm(A)
    phi = np.array([1.0, -2.0])
    assert dual_norm(C, phi) == pytest.approx(dual_norm(E, phi), rel=1e-9)
    assert np.allclose(legendre_inverse(C, phi), legendre_inverse(E, phi), atol=1e-6)
    value, u = maximize_on_sphere(C, phi)
    assert float(C.evaluate(u)) == pytest.approx(1, abs=1e-9)
    assert u @ phi == pytest.approx(value)


def test_legendre_pair():
    N = WeightedPNorm(1.5, [1, 1, 1])
    pair = LegendrePair.of(N, [1, -2, 0.5])
    assert pair.dual(pair.primal) == pytest.approx(float(N.evaluate(pair.primal)) ** 2)
