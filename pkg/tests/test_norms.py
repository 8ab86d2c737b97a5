import numpy as np
import pytest
from hypothesis import given, strategies as st

from minkowski import (CustomNorm, EllipsoidalNorm, EuclideanNorm, SingularPointError,
                       WeightedPNorm, norm_from_json, sphere_sample)
from minkowski.errors import DimensionError
from minkowski.norms import norm_eval, norm_grad, spot_check

from conftest import builtin_norms, norm_and_dim, vectors


def central_diff(f, x, h=1e-6):
    n = x.size
    return np.array([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(n)])


def test_norm_examples():
    assert norm_eval(EuclideanNorm(2), [3, 4]) == 5
    # brute force (sum |x_i|^4)^(1/4)
    assert norm_eval(WeightedPNorm(4, [1, 1]), [1, 1]) == pytest.approx(2 ** 0.25, rel=1e-12)
    assert norm_eval(WeightedPNorm(4, [1, 1]), [1, 1]) == pytest.approx(1.18920712, abs=1e-8)
    for N in builtin_norms(3):
        assert norm_eval(N, [0, 0, 0]) == 0


def test_gradient_examples():
    assert np.allclose(norm_grad(EuclideanNorm(2), [3, 4]).coeffs, [0.6, 0.8])
    N = WeightedPNorm(4, [1, 1])
    g = norm_grad(N, [1, 1]).coeffs
    assert np.allclose(g, 2 ** -0.75, atol=1e-8)
    assert np.allclose(g, central_diff(lambda z: norm_eval(N, z), np.array([1.0, 1.0])), atol=1e-8)
    assert g @ [1, 1] == pytest.approx(2 ** 0.25)
    with pytest.raises(SingularPointError):
        norm_grad(N, [0, 0])


@given(norm_and_dim(), st.data())
def test_gradient_matches_finite_differences(Nd, data):
    N, n = Nd
    x = data.draw(vectors(n, nonzero=True).filter(lambda v: np.linalg.norm(v) > 0.1))
    g = N.grad_array(x)
    assert np.allclose(g, central_diff(lambda z: float(N.evaluate(z)), x), atol=1e-6)
    # Euler relation for a 1-homogeneous function
    assert g @ x == pytest.approx(float(N.evaluate(x)), rel=1e-10)


@given(norm_and_dim(), st.data())
def test_norm_axioms(Nd, data):
    N, n = Nd
    x = data.draw(vectors(n, nonzero=False))
    y = data.draw(vectors(n, nonzero=False))
    a = data.draw(st.floats(-10, 10))
    nx = float(N.evaluate(x))
    assert nx >= 0
    assert float(N.evaluate(a * x)) == pytest.approx(abs(a) * nx, rel=1e-12, abs=1e-12)
    assert float(N.evaluate(x + y)) <= nx + float(N.evaluate(y)) + 1e-12


def test_gradient_is_continuous():
    N = WeightedPNorm(1.5, [1, 2, 3])
    x = np.array([1.0, -0.5, 0.3])
    e = np.array([0.3, 0.2, -1.0])
    errs = [np.max(np.abs(N.grad_array(x + d * e) - N.grad_array(x))) for d in 10.0 ** -np.arange(1, 7)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    # below a linear envelope c * delta
    c = errs[0] / 1e-1
    assert all(err <= 2 * c * 10.0 ** -(k + 1) for k, err in enumerate(errs))


def test_vectorised_evaluation_matches_rows():
    for N in builtin_norms(5):
        X = np.random.default_rng(0).standard_normal((7, 5))
        assert np.allclose(N.evaluate(X), [float(N.evaluate(r)) for r in X], rtol=1e-14)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        EuclideanNorm(2).evaluate([1, 2, 3])


def test_constructor_validation():
    with pytest.raises(ValueError):
        WeightedPNorm(1.0, [1, 1])
    with pytest.raises(ValueError):
        WeightedPNorm(2, [1, -1])
    with pytest.raises(ValueError):
        EllipsoidalNorm([[1, 0], [0, -1]])


def test_sphere_sample_examples():
    s = sphere_sample(EuclideanNorm(2), 4, seed=0)
    assert s.points.shape == (4, 2)
    assert np.allclose(np.linalg.norm(s.points, axis=1), 1, atol=1e-8)
    N = WeightedPNorm(4, [1, 1])
    assert np.allclose(N.evaluate(sphere_sample(N, 100).points), 1, atol=1e-8)
    assert len(sphere_sample(N, 1)) == 1
    with pytest.raises(ValueError):
        sphere_sample(N, 0)


def test_dual_norms_are_closed_form_duals():
    # sup of phi over a dense sample of the unit sphere never exceeds the dual norm
    for N in builtin_norms(2):
        S = sphere_sample(N, 20000).points
        c = np.array([0.7, -1.3])
        assert np.max(S @ c) <= N.dual_value(c) + 1e-12
        assert np.max(S @ c) == pytest.approx(N.dual_value(c), rel=1e-6)


def test_custom_norm_and_spot_check():
    A = np.diag([1.0, 9.0])
    N = CustomNorm(2, lambda x: float(np.sqrt(x @ A @ x)))
    ref = EllipsoidalNorm(A)
    x = np.array([0.3, -2.0])
    assert float(N.evaluate(x)) == pytest.approx(float(ref.evaluate(x)))
    assert np.allclose(N.grad_array(x), ref.grad_array(x), atol=1e-7)
    with pytest.raises(ValueError):
        CustomNorm(2, lambda x: float(np.max(np.abs(x))))  # not strictly convex
    with pytest.raises(ValueError):
        spot_check(CustomNorm(2, lambda x: float(x @ x), probes=0))


def test_norm_json():
    assert isinstance(norm_from_json("euclidean", 3), EuclideanNorm)
    N = norm_from_json({"type": "p", "p": 4}, 2)
    assert N == WeightedPNorm(4, [1, 1])
    for M in builtin_norms(3):
        assert float(norm_from_json(M.to_json(), 3).evaluate([1, 2, 3])) == float(M.evaluate([1, 2, 3]))
    with pytest.raises(ValueError):
        norm_from_json({"type": "sup"}, 2)
    with pytest.raises(ValueError):
        norm_from_json("euclidean")
