import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from loja import fixtures
from loja.domain import Domain
from loja.errors import IsolatedPointError, NotInDomainError
from loja.geometry import PointSet, hausdorff
from loja.medial import (
    ClosedSetSample, _region_mask, check_closed, check_closed_levels, closest_points, m_multifunction,
    m_preimage_mask, medial_axis, medial_loja, n_region, weak_preimage_n_mask,
)
from loja.multifun import classify_semicontinuity

from oracles import hausdorff_to_interval

X01 = np.array([[0.0], [1.0]])
SQUARE = Domain([[-2.0, 2.0], [-2.0, 2.0]])


def seg(x0, x1, y0, y1, n=20001):
    t = np.linspace(0, 1, n)
    return np.column_stack([x0 + t * (x1 - x0), y0 + t * (y1 - y0)])


def test_closest_points_examples():
    assert closest_points(X01, [0.25]).equals(PointSet([[0.0]]))
    assert closest_points(X01, [0.5]).equals(PointSet(X01))
    assert closest_points(X01, [1.0]).equals(PointSet([[1.0]]))


def test_n_region_on_circle():
    fx = fixtures.circle()
    R = n_region(fx.X, [1.0, 0.0], SQUARE, tol_med=1e-9)
    pitch = SQUARE.sample(10_000).pitch
    assert np.abs(R.points[:, 1]).max() <= 2 * fx.pitch
    assert hausdorff(R, seg(0, 2, 0, 0)) <= pitch + 1e-3


def test_n_region_two_points():
    D = Domain([[-1.0, 2.0]])
    R = n_region(X01, [0.0], D)
    assert R.points.max() <= 0.5
    assert hausdorff_to_interval(R.points, -1.0, 0.5) <= D.sample(10_000).pitch


def test_n_region_single_point_is_whole_domain():
    D = Domain([[-1.0, 1.0], [-1.0, 1.0]])
    R = n_region([[0.3, 0.3]], [0.3, 0.3], D, samples=500)
    assert len(R) == len(PointSet(D.sample(500).interior))


def test_n_region_needs_point_of_x():
    with pytest.raises(NotInDomainError):
        n_region(X01, [0.4], Domain([[-1.0, 2.0]]))


def test_medial_axis_bisector():
    ax = medial_axis(fixtures.twopoint().X, SQUARE, samples=2000)
    assert np.all(ax.multiplicity == 2)
    assert np.abs(ax.points[:, 0]).max() <= 1e-9
    pitch = SQUARE.sample(2000).pitch
    assert hausdorff(PointSet(ax.points), seg(0, 0, -2, 2)) <= pitch + 1e-3


def test_medial_axis_circle_center():
    ax = medial_axis(fixtures.circle().X, Domain([[-0.9, 0.9], [-0.9, 0.9]]), 4000, tol_med=1e-6)
    r = np.linalg.norm(ax.points, axis=1)
    assert r.min() == 0.0 and r.max() <= ax.pitch


def test_medial_axis_single_point_empty():
    assert len(medial_axis([[0.0, 0.0]], SQUARE, samples=500)) == 0


def _interval_levels(kind, rounds=3):
    D = Domain([[0.0, 1.0]])
    levels = []
    for k in range(rounds):
        P, pitch = D.nested_level(11, k)
        levels.append((P, m_preimage_mask(X01, [0.25], P, kind), pitch))
    return levels


def test_check_closed_strong_preimage_has_witness():
    v = check_closed_levels(_interval_levels("strong"))
    assert not v.closed and v.witness.tolist() == [0.5]
    assert all(d > 0 for d in v.distances)
    assert v.distances == tuple(sorted(v.distances, reverse=True))


def test_check_closed_upper_preimage_closed():
    v = check_closed_levels(_interval_levels("upper"))
    assert v.closed and v.witness is None and v.verdict == "consistent-with-closed"


def test_check_closed_open_set():
    v = check_closed(lambda P: P[:, 0] < 0.25, Domain([[0.0, 1.0]]))
    assert not v.closed and v.witness[0] == 0.25
    v = check_closed(lambda P: P[:, 0] <= 0.25, Domain([[0.0, 1.0]]))
    assert v.closed


def test_n_regions_are_closed():
    D = Domain([[-2.0, 2.0], [-2.0, 2.0]])
    cases = [(fixtures.twopoint().X, [1.0, 0.0], 3),
             # a coarse point sits 0.007 outside N((0,0)); pitch must drop below that
             (fixtures.parabola().X, [0.0, 0.0], 5)]
    for X, a, rounds in cases:
        Xs, a = ClosedSetSample.of(X, 0.0), np.asarray(a)
        v = check_closed(lambda P: _region_mask(Xs, a, P, 1e-9), D, rounds)
        assert v.closed, v.to_dict()


def test_weak_preimage_1d_is_closed():
    fx = fixtures.interval_with_point()
    for a in (0.5, 1.0, 2.0):
        mask = weak_preimage_n_mask(fx.X, [a], window=10.0)
        chosen = fx.X[mask].ravel()
        # Voronoi neighbours on the line are the samples next to a
        i = int(np.flatnonzero(fx.X.ravel() == a)[0])
        want = fx.X.ravel()[max(0, i - 1): i + 2]
        np.testing.assert_array_equal(np.sort(chosen), np.sort(want))


def test_weak_preimage_parabola_misses_origin_neighbours():
    fx = fixtures.parabola(16)
    h = fx.params["h"]
    mask = weak_preimage_n_mask(fx.X, [1.0, 0.0], window=1 / (3 * h))
    assert mask[np.flatnonzero((fx.X == [1.0, 0.0]).all(axis=1))[0]]
    assert not mask[0]  # N((0,0)) and N((1,0)) are disjoint


def test_medial_loja_examples():
    fit = medial_loja(X01, [0.25], Domain([[0.0, 0.45]]), "m")
    assert fit.feasible and "degenerate" in fit.flags
    fit = medial_loja(X01, [0.5], Domain([[0.3, 0.7]]), "m")
    # m(x) = {0} or {1} off 0.5, so dist_H(m(x), m(0.5)) = 1 and the fit is flat
    assert fit.feasible and fit.min_residual >= -1e-9
    fx = fixtures.circle(400)
    arc = Domain([[0.9, 1.0], [-0.3, 0.3]])
    fit = medial_loja(fx.X, [1.0, 0.0], arc, "N", region=Domain([[-2.0, 3.0], [-2.5, 2.5]]))
    assert fit.feasible
    with pytest.raises(IsolatedPointError):
        medial_loja(X01, [0.0], Domain([[-1.0, 1.0]]), "N")


def test_closest_point_map_is_upper_semicontinuous():
    F = m_multifunction(X01, np.linspace(0, 1, 1001))
    for a in (0.25, 0.5, 0.75):
        flags = classify_semicontinuity(F, [a])
        assert flags["upper"] and flags["outer"]
    fx = fixtures.twopoint()
    F = m_multifunction(fx.X, SQUARE.sample(4000).interior, tol_med=1e-9)
    assert classify_semicontinuity(F, [0.0, 0.5])["upper"]


# ---------------------------------------------------------------------------
# properties

finite_sets = arrays(float, st.tuples(st.integers(1, 15), st.just(2)),
                     elements=st.floats(-5, 5, allow_nan=False))
points = arrays(float, 2, elements=st.floats(-5, 5, allow_nan=False))


@given(finite_sets, points)
def test_closest_points_lie_on_sphere(X, x):
    Xs = ClosedSetSample.of(PointSet(X), pitch=0.0)
    tol = 1e-9
    m = closest_points(Xs, x, tol)
    d = np.linalg.norm(Xs.points - x, axis=1)
    on_sphere = Xs.points[np.abs(d - d.min()) <= tol]
    assert m.equals(PointSet(on_sphere))


@given(finite_sets, st.data())
def test_zero_distance_symmetry(X, data):
    Xs = ClosedSetSample.of(PointSet(X), pitch=0.0)
    i = data.draw(st.integers(0, len(Xs.X) - 1))
    x = Xs.points[i]
    assert closest_points(Xs, x, 1e-9).equals(PointSet([x]))
    assert n_region(Xs, x, SQUARE, tol_med=1e-9, points=x[None, :]).contains(x)
