"""The verification suites at reduced case counts, plus their helpers."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from minkowski import EuclideanNorm, WeightedPNorm, cyclic_monotone_check, legendre
from minkowski.core import make_rng
from minkowski.subdifferential import edge_weights
from minkowski.verify import (CRITERIA, SUITES, VerifyConfig, VerifyReport, boundary_points,
                              cross_polytope, cube, hand_cycle_weight, monotone_set,
                              random_max_affine, run_suite, simplex, swap_perturb)

SMALL = VerifyConfig(seed=11).scaled(0.02)


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion_small_scale(k):
    rep = CRITERIA[k](SMALL)
    assert rep.cases_run > 0
    assert rep.ok, rep.failures[:3]


def test_report_bookkeeping():
    r = VerifyReport("x")
    r.record("a", 0.5, 1.0)
    r.record("a", 2.0, 1.0, inputs=np.array([1.0]))
    assert r.cases_run == 2 and not r.ok and r.worst["a"] == 2.0
    assert r.failures[0]["inputs"] == [1.0]
    total = VerifyReport("t").merge(r)
    assert total.cases_run == 2 and len(total.failures) == 1


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
    assert set(SUITES["all"]) == set(range(1, 13))


def test_scaled_config_keeps_at_least_one_case():
    cfg = VerifyConfig().scaled(1e-9)
    assert cfg.legendre_vectors == 1 and cfg.monotone_sets == 1


def test_standard_bodies():
    for n in (2, 3, 5):
        assert len(cube(n).extreme_points) == 2 ** n
        assert len(cross_polytope(n).extreme_points) == 2 * n
        assert len(simplex(n).extreme_points) == n + 1
    pts = boundary_points(cube(2))
    assert all(cube(2).on_boundary(p) for p in pts)


@given(st.integers(0, 10**6))
def test_generated_sets_are_monotone_and_perturbations_are_not(seed):
    rng = make_rng(seed)
    N = WeightedPNorm(4, np.ones(3))
    S = monotone_set(N, rng, 8)
    assert len(S) <= 12 and cyclic_monotone_check(S, N)[0]
    bad = swap_perturb(S, N, rng)
    if bad is not None:
        ok, cycle, _ = cyclic_monotone_check(bad, N)
        assert not ok
        assert hand_cycle_weight(bad, N, cycle) > 0


def test_hand_cycle_weight_matches_edge_weights():
    rng = make_rng(2)
    N = EuclideanNorm(2)
    S = monotone_set(N, rng, 5)
    C = edge_weights(S, N)
    cyc = [0, 2, 4]
    assert hand_cycle_weight(S, N, cyc) == pytest.approx(C[0, 2] + C[2, 4] + C[4, 0])
    x0, w0 = S.pairs[0]
    x2, _ = S.pairs[2]
    assert C[0, 2] == pytest.approx(legendre(N, w0)(x2 - x0))


def test_random_max_affine_shapes():
    f, x = random_max_affine(3, make_rng(0), kinks=3)
    assert f.phi.shape[1] == 3 and 3 <= len(f.phi) <= 8
    assert len(f.active(x)) >= 3
