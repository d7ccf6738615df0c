import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loja import fixtures
from loja.domain import Domain
from loja.errors import LojaError
from loja.expr import parse
from loja.geometry import dists_to_set, hausdorff
from loja.zeroset import cluster_representatives, gamma_zero_set, inclusion_check

from oracles import hausdorff_to_interval

UNIT = Domain([(0.0, 1.0)])


def test_oracle_sanity():
    assert hausdorff_to_interval([0.0, 1.0], 0, 1) == 0.5
    assert hausdorff_to_interval([0.5], 0, 1) == 0.5
    assert hausdorff_to_interval([2.0, 0.0, 1.0], 0, 1) == 1.0


def test_zero_function_covers_interval():
    est = gamma_zero_set(parse("0"), UNIT)
    assert hausdorff_to_interval(est.points.points, 0, 1) <= est.delta + est.pitch


def test_limit_point_is_included():
    fx = fixtures.ex3_9()
    est = gamma_zero_set(fx.g, fx.domain)
    pts = est.points.points.ravel()
    assert np.any(pts == 0.0)
    assert hausdorff_to_interval(pts, 0, 1) <= est.delta + est.pitch
    i = int(np.flatnonzero(pts == 0.0)[0])
    assert est.witnesses[i, 0] > 0 and est.witness_values[i] <= est.eps


def test_positive_function_has_empty_estimate():
    for eps in (1e-4, 0.5, 0.999):
        est = gamma_zero_set(parse("x1^2 + 1"), Domain([(-1.0, 1.0)]), eps=eps)
        assert est.is_empty and est.to_dict()["n_points"] == 0


def test_continuous_function_converges_to_zero_set():
    f = parse("x1*(x1 - 1)")
    D = Domain([(-0.5, 1.5)])
    prev = np.inf
    for eps, samples in ((1e-1, 1000), (1e-2, 4000), (1e-3, 16000)):
        est = gamma_zero_set(f, D, eps=eps, samples=samples, delta=1e-2)
        d = hausdorff(est.points, [[0.0], [1.0]])
        assert d <= prev + 1e-12
        prev = d
    assert prev <= 2e-3
    np.testing.assert_allclose(est.representatives.points.ravel(), [0.0, 1.0], atol=2e-3)


def test_two_dimensional_circle():
    D = Domain([(-1.5, 1.5), (-1.5, 1.5)])
    est = gamma_zero_set(parse("x1^2 + x2^2 - 1"), D, eps=5e-2, delta=0.05, samples=40_000)
    r = np.linalg.norm(est.points.points, axis=1)
    assert np.all(np.abs(r - 1) <= 0.05)
    assert len(est.representatives) == 1


def test_witnesses_within_reach():
    f = parse("x1*(x1 - 0.3)")
    est = gamma_zero_set(f, UNIT, eps=1e-3, samples=2000)
    d = np.linalg.norm(est.points.points - est.witnesses, axis=1)
    assert np.all(d <= est.delta + 1e-12)
    assert np.all(est.witness_values <= est.eps)


@settings(max_examples=15)
@given(st.floats(0.05, 0.95), st.sampled_from([1e-2, 1e-3]))
def test_refinement_adds_no_far_clusters(root, eps):
    f = parse(f"(x1 - {root!r})^2")
    coarse = gamma_zero_set(f, UNIT, eps=eps, samples=1000)
    fine = gamma_zero_set(f, UNIT, eps=eps / 2, samples=4000)
    if coarse.is_empty or fine.is_empty:
        return
    assert np.all(dists_to_set(fine.representatives.points, coarse.points) <= coarse.delta + 1e-12)


def test_inclusion_check():
    fx = fixtures.ex3_9()
    est_f = gamma_zero_set(fx.f, fx.domain, samples=500)
    ok, bad = inclusion_check(est_f, fx.g)
    # 0 is a gamma-zero of f but g(0) = 1
    assert not ok and np.any(bad == 0.0)
    est = gamma_zero_set(parse("x1*(x1 - 0.5)"), UNIT, samples=500)
    ok, bad = inclusion_check(est, parse("x1*(x1 - 0.5)"))
    assert not ok  # neighbours within one pitch do not vanish exactly
    ok, _ = inclusion_check(est, parse("x1*(x1 - 0.5)"), tol_incl=1e-2)
    assert ok


def test_cluster_representatives_lexicographic():
    P = np.array([[0.2, 0.0], [0.1, 5.0], [3.0, 0.0], [0.1, 0.1]])
    reps = cluster_representatives(P, 0.3)
    np.testing.assert_array_equal(reps, [[0.1, 0.1], [0.1, 5.0], [3.0, 0.0]])


def test_bad_parameters():
    with pytest.raises(LojaError):
        gamma_zero_set(parse("x1"), UNIT, eps=0)
    with pytest.raises(LojaError):
        gamma_zero_set(parse("x1"), UNIT, delta=-1)


def test_deterministic():
    a = gamma_zero_set(parse("x1 - 0.3"), UNIT, eps=1e-2, seed=7)
    b = gamma_zero_set(parse("x1 - 0.3"), UNIT, eps=1e-2, seed=7)
    assert a.to_dict() == b.to_dict()
