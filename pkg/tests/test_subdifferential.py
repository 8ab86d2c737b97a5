import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from minkowski import (ConvergenceError, DistanceFunction, EuclideanNorm, MaxAffine,
                       MonotoneData, MonotonicityError, NotDifferentiableError, Polytope,
                       WeightedPNorm, cyclic_monotone_check, estimate_check, function_from_json,
                       half_square, legendre, norm_function, norm_gradient, normal_cone,
                       rockafellar_potential, subgradient_construct, subgradient_member)
from minkowski.core import make_rng
from minkowski.subdifferential import (completed_basis, convexity_violation,
                                       one_sided_derivative, subgradient_inequality)

from conftest import builtin_norms, norm_and_dim, vectors

ABS_X1 = MaxAffine([([1, 0], 0), ([-1, 0], 0)])


def exhaustive_monotone(S, N):
    """Check every simple cycle of a small set by enumeration."""
    X = [x for x, _ in S.pairs]
    C = [legendre(N, w).coeffs for _, w in S.pairs]
    m = len(X)
    for k in range(2, m + 1):
        for cyc in itertools.permutations(range(m), k):
            if cyc[0] != min(cyc):
                continue
            total = sum(C[cyc[i]] @ (X[cyc[(i + 1) % k]] - X[cyc[i]]) for i in range(k))
            if total > 1e-9:
                return False
    return True


def test_directional_derivative_examples(square):
    assert ABS_X1.dir_deriv_plus([0, 0], [1, 0]) == 1
    assert ABS_X1.dir_deriv_plus([0, 0], [0, 0]) == 0
    f = DistanceFunction(square, EuclideanNorm(2))
    assert f.dir_deriv_plus([3, 0], [1, 0]) == pytest.approx(1, abs=1e-8)
    assert f.dir_deriv_minus([3, 0], [1, 0]) == pytest.approx(1, abs=1e-8)


def test_one_sided_derivative_of_a_kink():
    f = lambda x: abs(x[0] - 0.2) + x[1] ** 2
    x = np.array([0.2, 1.0])
    assert one_sided_derivative(f, x, np.array([1.0, 0.0])) == pytest.approx(1, abs=1e-7)
    assert one_sided_derivative(f, x, np.array([-1.0, 0.0])) == pytest.approx(1, abs=1e-7)
    assert one_sided_derivative(f, x, np.array([0.0, 1.0])) == pytest.approx(2, abs=1e-6)


def test_norm_gradient_examples(square, p4):
    assert np.allclose(norm_gradient(norm_function(p4), [1, 1], p4), np.array([1, 1]) / 2 ** 0.25)
    assert np.allclose(norm_gradient(DistanceFunction(square, p4), [3, 0], p4), [1, 0], atol=1e-6)
    E = EuclideanNorm(2)
    assert np.allclose(norm_gradient(half_square(E), [2, 1], E), [2, 1])
    with pytest.raises(NotDifferentiableError):
        norm_gradient(ABS_X1, [0, 0], E)


def test_member_examples(square, p4):
    E = EuclideanNorm(2)
    assert subgradient_member(ABS_X1, [0, 0], [0.5, 0], E).member
    cert = subgradient_member(ABS_X1, [0, 0], [2, 0], E)
    assert not cert.member
    assert ABS_X1.dir_deriv_plus([0, 0], cert.worst_direction) < legendre(E, [2, 0])(cert.worst_direction)
    f = DistanceFunction(square, p4)
    g = normal_cone(square, [1, 1], p4).generators[0]
    assert subgradient_member(f, [1, 1], 0.7 * g, p4).member
    # direct inequality sampling: f(y) - f(x) >= L(v)(y - x)
    ys = make_rng(0).uniform(-3, 3, (200, 2))
    assert subgradient_inequality(f, [1, 1], 0.7 * g, p4, ys) >= -1e-9


def test_construct_examples():
    E = EuclideanNorm(2)
    w = subgradient_construct(ABS_X1, [0, 0], [1, 0], E)
    assert np.allclose(w, [1, 0])
    assert legendre(E, w)([1, 0]) == pytest.approx(1)
    assert np.allclose(subgradient_construct(ABS_X1, [0, 0], [-1, 0], E), [-1, 0])


@given(st.sampled_from(builtin_norms(2) + builtin_norms(3)), st.data())
def test_construct_equals_gradient_where_differentiable(N, data):
    x = data.draw(vectors(N.dim).filter(lambda v: np.linalg.norm(v) > 0.5))
    u = data.draw(vectors(N.dim))
    f = norm_function(N)
    w = subgradient_construct(f, x, u, N)
    assert np.allclose(w, norm_gradient(f, x, N), atol=1e-6)


def test_construct_at_a_kink_in_3d():
    rng = make_rng(4)
    phi = rng.standard_normal((5, 3))
    f = MaxAffine([(p, 0.0) for p in phi])
    N = WeightedPNorm(1.5, [1, 1, 1])
    for _ in range(10):
        u = rng.standard_normal(3)
        w = subgradient_construct(f, np.zeros(3), u, N)
        assert subgradient_member(f, np.zeros(3), w, N).member
        assert legendre(N, w)(u) == pytest.approx(f.dir_deriv_plus(np.zeros(3), u), abs=1e-9)


def test_completed_basis():
    u = np.array([0.0, 2.0, 1.0])
    E = completed_basis(u)
    assert np.allclose(E[0], u / np.linalg.norm(u))
    # then the coordinate directions with the largest orthogonal component
    assert np.array_equal(E[1:], [[1, 0, 0], [0, 0, 1]])
    assert np.linalg.matrix_rank(E) == 3


def test_estimate_examples(p4):
    f = norm_function(p4)
    v = norm_gradient(f, [1, 1], p4)
    lo, mid, hi, ok = estimate_check(f, [1, 1], v, p4)
    assert ok
    # v = x / rho(x) is a unit vector, so the middle value ||v||^2 is 1
    assert mid == pytest.approx(1, abs=1e-12)
    assert lo == pytest.approx(mid, abs=1e-5) and hi == pytest.approx(mid, abs=1e-5)
    w = subgradient_construct(ABS_X1, [0, 0], [1, 0.3], EuclideanNorm(2))
    assert estimate_check(ABS_X1, [0, 0], w, EuclideanNorm(2))[3]


def test_cyclic_monotone_examples():
    E = EuclideanNorm(2)
    S = MonotoneData([([0, 0], [0, 0]), ([1, 0], [1, 0])])
    assert cyclic_monotone_check(S, E)[0] and exhaustive_monotone(S, E)
    bad = MonotoneData([([0, 0], [1, 0]), ([1, 0], [-1, 0])])
    ok, cycle, _ = cyclic_monotone_check(bad, E)
    assert not ok and sorted(cycle) == [0, 1] and not exhaustive_monotone(bad, E)


@given(st.integers(0, 10**6), st.integers(2, 6))
def test_gradient_pairs_are_monotone(seed, m):
    rng = make_rng(seed)
    N = WeightedPNorm(4, [1, 1])
    X = rng.standard_normal((m, 2))
    # gradient pairs of 1/2 rho^2 are (x, x)
    S = MonotoneData([(x, x) for x in X])
    assert cyclic_monotone_check(S, N)[0]
    assert exhaustive_monotone(S, N)


@given(st.integers(0, 10**6))
def test_monotone_check_matches_enumeration(seed):
    rng = make_rng(seed)
    N = EuclideanNorm(2)
    S = MonotoneData([(x, w) for x, w in rng.standard_normal((5, 2, 2))])
    assert cyclic_monotone_check(S, N)[0] == exhaustive_monotone(S, N)


def test_rockafellar_examples():
    E = EuclideanNorm(2)
    f = rockafellar_potential(MonotoneData([([0, 0], [0, 0])]), E)
    assert f([3, -1]) == 0 and f([0, 0]) == 0
    S = MonotoneData([([0, 0], [0, 0]), ([1, 0], [1, 0])])
    f = rockafellar_potential(S, E)
    for y in make_rng(0).uniform(-3, 3, (50, 2)):
        assert f(y) == pytest.approx(max(0, y[0] - 1))
    for x, w in S.pairs:
        assert subgradient_member(f, x, w, E).member
    with pytest.raises(MonotonicityError) as err:
        rockafellar_potential(MonotoneData([([0, 0], [1, 0]), ([1, 0], [-1, 0])]), E)
    assert err.value.cycle


def test_rockafellar_from_half_square():
    E = EuclideanNorm(2)
    X = np.array([[0, 0], [1, 0], [0, 1]], dtype=float)
    S = MonotoneData([(x, x) for x in X])
    f = rockafellar_potential(S, E)
    for x, w in S.pairs:
        assert f(x) <= 0.5 * x @ x + 1e-12
        assert subgradient_member(f, x, w, E).member


def test_convexity_violation():
    rng = make_rng(0)
    pts = rng.standard_normal((30, 2))
    assert convexity_violation(norm_function(EuclideanNorm(2)), pts, rng) <= 1e-12


def test_function_json(square, p4):
    f = function_from_json(ABS_X1.to_json())
    assert f([-2, 5]) == 2
    g = function_from_json(DistanceFunction(square, p4).to_json())
    assert g([3, 0]) == pytest.approx(2)
    assert function_from_json({"type": "norm"}, p4)([1, 1]) == pytest.approx(2 ** 0.25)
    with pytest.raises(ValueError):
        function_from_json({"type": "norm"})
