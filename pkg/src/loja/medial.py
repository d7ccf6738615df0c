"""Closest-point multifunction m and its dual N, with medial axis and closedness probes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .config import TOL_PT
from .domain import Domain
from .errors import IsolatedPointError, LojaError, NotInDomainError
from .geometry import PointSet, as_pointset
from .lojafit import PowerLawFit
from .multifun import SampledMultifunction, leader_cluster, multifun_loja_fit, preimage_mask


@dataclass(frozen=True)
class ClosedSetSample:
    """Finite sample of a closed set X; ``pitch`` is its sampling resolution (0 if exact)."""

    X: PointSet
    pitch: float = 0.0

    def __post_init__(self):
        if self.X.is_empty:
            raise LojaError("a closed-set sample must be nonempty")

    @classmethod
    def of(cls, X, pitch: float | None = None) -> "ClosedSetSample":
        if isinstance(X, ClosedSetSample):
            return X
        P = as_pointset(X)
        if pitch is None:
            pitch = estimate_pitch(P.points)
        return cls(P, pitch)

    @property
    def points(self) -> np.ndarray:
        return self.X.points

    @property
    def dim(self) -> int:
        return self.X.dim

    @property
    def default_tol(self) -> float:
        return max(2.0 * self.pitch, 1e-9)


def estimate_pitch(P: np.ndarray) -> float:
    """Median nearest-neighbour spacing; 0 for sets of isolated points (fewer than 3)."""
    if P.shape[0] < 3:
        return 0.0
    _, d2, _ = kernels.nearest_stats(P, P, 0.0)
    return float(np.median(d2))


def _tol(Xs: ClosedSetSample, tol_med):
    return Xs.default_tol if tol_med is None else float(tol_med)


def closest_points(X, x, tol_med: float | None = None) -> PointSet:
    """``m(x)``: samples of X within ``d(x, X) + tol_med`` of ``x``."""
    Xs = ClosedSetSample.of(X)
    tol = _tol(Xs, tol_med)
    if not tol > 0:
        raise LojaError("tol_med must be positive")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    d = np.linalg.norm(Xs.points - x, axis=1)
    return PointSet(Xs.points[d <= d.min() + tol], dim=Xs.dim)


def _snap(Xs: ClosedSetSample, a) -> np.ndarray:
    a = np.asarray(a, dtype=float).reshape(-1)
    d = np.linalg.norm(Xs.points - a, axis=1)
    i = int(np.argmin(d))
    if d[i] > max(TOL_PT, Xs.pitch):
        raise NotInDomainError(f"{a.tolist()} is not a point of X (nearest sample at {d[i]:.3g})")
    return Xs.points[i]


def _region_mask(Xs: ClosedSetSample, a: np.ndarray, P: np.ndarray, tol: float) -> np.ndarray:
    """Rows of P whose closest-point set contains ``a``."""
    if P.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    d1 = kernels.min_dists(P, Xs.points)
    da = np.linalg.norm(P - a, axis=1)
    return da <= d1 + tol


def n_region(X, a, D: Domain, samples: int = 10_000, seed: int = 42,
             tol_med: float | None = None, points=None) -> PointSet:
    """``N(a)``: domain samples x with ``a`` among the closest points of x."""
    Xs = ClosedSetSample.of(X)
    a = _snap(Xs, a)
    P = D.sample(samples, seed).interior if points is None else np.asarray(points, float)
    return PointSet(P[_region_mask(Xs, a, P, _tol(Xs, tol_med))], dim=Xs.dim)


# ---------------------------------------------------------------------------
# medial axis


@dataclass(frozen=True)
class MedialAxisEstimate:
    points: np.ndarray
    multiplicity: np.ndarray
    gap: np.ndarray
    tol_med: float
    pitch: float

    def __len__(self) -> int:
        return self.points.shape[0]

    def rows(self) -> np.ndarray:
        return np.column_stack([self.points, self.multiplicity, self.gap])


def multiplicities(Xs: ClosedSetSample, P: np.ndarray, tol: float, sep: float) -> np.ndarray:
    """Number of separated groups in ``m(x)``: leaders at spacing ``sep`` among the closest points."""
    out = np.ones(P.shape[0], dtype=np.int64)
    for i, x in enumerate(P):
        d = np.linalg.norm(Xs.points - x, axis=1)
        near = Xs.points[d <= d.min() + tol]
        if near.shape[0] > 1:
            out[i] = leader_cluster(near, sep).shape[0]
    return out


def medial_axis(X, D: Domain, samples: int = 10_000, seed: int = 42,
                tol_med: float | None = None) -> MedialAxisEstimate:
    """Domain samples whose closest-point set has at least two separated members."""
    Xs = ClosedSetSample.of(X)
    tol = _tol(Xs, tol_med)
    S = D.sample(samples, seed)
    P = S.interior
    d1, d2, cnt = kernels.nearest_stats(P, Xs.points, tol)
    cand = np.flatnonzero(cnt >= 2)
    sep = max(2.0 * Xs.pitch, TOL_PT)
    mult = multiplicities(Xs, P[cand], tol, sep)
    keep = cand[mult >= 2]
    return MedialAxisEstimate(P[keep], mult[mult >= 2], (d2 - d1)[keep], tol, S.pitch)


# ---------------------------------------------------------------------------
# weak preimage of N: Voronoi adjacency of a finite sample


def _adjacent_1d(P: np.ndarray, a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    z = 0.5 * (a + b)
    return bool(kernels.min_dists(z[None, :], P)[0] >= np.linalg.norm(z - a) - tol)


def _adjacent_2d(P, a, b, window, tol) -> bool:
    mid = 0.5 * (a + b)
    ab = b - a
    direction = np.array([-ab[1], ab[0]])
    direction /= np.linalg.norm(direction)
    # |z-a|^2 <= |z-c|^2  <=>  2 z.(c-a) <= |c|^2 - |a|^2, with z = mid + t*direction
    C = P - a
    rhs = np.sum(P * P, axis=1) - a @ a - 2.0 * (C @ mid)
    coef = 2.0 * (C @ direction)
    lo, hi = -np.inf, np.inf
    # window: |z_i| <= window
    for i in range(2):
        if abs(direction[i]) > 1e-300:
            t1 = (-window - mid[i]) / direction[i]
            t2 = (window - mid[i]) / direction[i]
            lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
        elif abs(mid[i]) > window:
            return False
    scale = 1.0 + np.abs(rhs)
    pos = coef > 0
    neg = coef < 0
    if pos.any():
        hi = min(hi, np.min((rhs[pos] + tol * scale[pos]) / coef[pos]))
    if neg.any():
        lo = max(lo, np.max((rhs[neg] + tol * scale[neg]) / coef[neg]))
    if np.any((coef == 0) & (rhs < -tol * scale)):
        return False
    return lo <= hi


def _adjacent_nd(P, a, b, window, tol) -> bool:
    n = P.shape[1]
    A_ub = 2.0 * (P - a)
    b_ub = np.sum(P * P, axis=1) - a @ a + tol
    A_eq = 2.0 * (b - a)[None, :]
    b_eq = np.array([b @ b - a @ a])
    res = linprog(np.zeros(n), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=[(-window, window)] * n, method="highs")
    return res.status == 0


def weak_preimage_n_mask(X, a, window: float, tol: float = 1e-12) -> np.ndarray:
    """Mask of samples b with ``N(b) meets N(a)`` inside the box ``[-window, window]^n``.

    For a finite sample, ``N(b)`` is the closed Voronoi cell of ``b``; two cells
    meet exactly when some point of the bisector of ``a`` and ``b`` is at least
    as close to them as to every other sample.
    """
    Xs = ClosedSetSample.of(X)
    a = _snap(Xs, a)
    P = Xs.points
    n = P.shape[1]
    out = np.zeros(P.shape[0], dtype=bool)
    for i, b in enumerate(P):
        if np.linalg.norm(b - a) <= TOL_PT:
            out[i] = True
        elif n == 1:
            out[i] = _adjacent_1d(P, a, b, tol)
        elif n == 2:
            out[i] = _adjacent_2d(P, a, b, window, tol)
        else:
            out[i] = _adjacent_nd(P, a, b, window, tol)
    return out


def lower_preimage_n_mask(X, a, region_points, tol_med: float | None = None) -> np.ndarray:
    """Mask of samples b with ``N(b) subset of N(a)`` (checked on ``region_points``)."""
    Xs = ClosedSetSample.of(X)
    a = _snap(Xs, a)
    tol = _tol(Xs, tol_med)
    P = np.asarray(region_points, dtype=float)
    in_a = _region_mask(Xs, a, P, tol)
    out = np.zeros(Xs.points.shape[0], dtype=bool)
    for i, b in enumerate(Xs.points):
        in_b = _region_mask(Xs, b, P, tol)
        out[i] = in_b.any() and not np.any(in_b & ~in_a)
    return out


def upper_preimage_n_mask(X, a, region_points, tol_med: float | None = None) -> np.ndarray:
    """Mask of samples b with ``N(a) subset of N(b)`` (checked on ``region_points``)."""
    Xs = ClosedSetSample.of(X)
    a = _snap(Xs, a)
    tol = _tol(Xs, tol_med)
    P = np.asarray(region_points, dtype=float)
    in_a = _region_mask(Xs, a, P, tol)
    out = np.zeros(Xs.points.shape[0], dtype=bool)
    for i, b in enumerate(Xs.points):
        out[i] = not np.any(in_a & ~_region_mask(Xs, b, P, tol))
    return out


# ---------------------------------------------------------------------------
# closedness probe


@dataclass(frozen=True)
class ClosedVerdict:
    closed: bool
    witness: np.ndarray | None
    distances: tuple[float, ...]
    pitches: tuple[float, ...]

    @property
    def verdict(self) -> str:
        return "consistent-with-closed" if self.closed else "witness-of-nonclosedness"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.tolist(),
            "distances": list(self.distances),
            "pitches": list(self.pitches),
        }


Level = tuple  # (ambient points, mask of S, pitch)


def check_closed_levels(levels: Sequence[Level], reach: float = 2.0) -> ClosedVerdict:
    """Look for a limit point of S that S misses, across nested refinements.

    A witness is a point of the coarsest ambient sample that reappears at every
    level and is never in S, while lying within ``reach * pitch_k`` of S at
    every level k. The closest such point (lexicographic on ties) is returned.
    """
    if len(levels) < 2:
        raise LojaError("closedness needs at least two resolutions")
    base = np.asarray(levels[0][0], dtype=float)
    cand = np.ones(base.shape[0], dtype=bool)
    dist_final = None
    for P, mask, pitch in levels:
        P = np.asarray(P, dtype=float)
        S = P[mask]
        if S.shape[0] == 0:
            return ClosedVerdict(True, None, (), tuple(float(l[2]) for l in levels))
        in_S = kernels.min_dists(base, S) <= TOL_PT
        present = kernels.min_dists(base, P) <= TOL_PT
        d = kernels.min_dists(base, S)
        cand &= present & ~in_S & (d <= reach * pitch * (1 + 1e-9))
        dist_final = d
    pitches = tuple(float(l[2]) for l in levels)
    if not cand.any():
        return ClosedVerdict(True, None, (), pitches)
    idx = np.flatnonzero(cand)
    order = np.lexsort(np.vstack([base[idx].T[::-1], dist_final[idx]]))
    w = base[idx[order[0]]]
    dists = []
    for P, mask, _ in levels:
        S = np.asarray(P, float)[mask]
        dists.append(float(kernels.min_dists(w[None, :], S)[0]))
    return ClosedVerdict(False, w, tuple(dists), pitches)


def check_closed(scan: Callable[[np.ndarray], np.ndarray], D: Domain, rounds: int = 3,
                 base_per_dim: int = 21, reach: float = 2.0) -> ClosedVerdict:
    """Run ``scan`` (ambient points -> membership mask) on nested grids of D."""
    levels = []
    for k in range(rounds):
        P, pitch = D.nested_level(base_per_dim, k)
        P = P[D.contains(P)]
        levels.append((P, np.asarray(scan(P), dtype=bool), pitch))
    return check_closed_levels(levels, reach)


# ---------------------------------------------------------------------------
# multifunctions m and N


def m_multifunction(X, points, tol_med: float | None = None) -> SampledMultifunction:
    Xs = ClosedSetSample.of(X)
    tol = _tol(Xs, tol_med)
    return SampledMultifunction.from_generator(
        points, lambda x: closest_points(Xs, x, tol).points, value_dim=Xs.dim)


def n_multifunction(X, region_points, tol_med: float | None = None,
                    arguments=None) -> SampledMultifunction:
    """``N`` on the samples of X, each value sampled on ``region_points``."""
    Xs = ClosedSetSample.of(X)
    tol = _tol(Xs, tol_med)
    R = np.asarray(region_points, dtype=float)

    def gen(b):
        b = _snap(Xs, b)
        return R[_region_mask(Xs, b, R, tol)]

    args = Xs.points if arguments is None else np.asarray(arguments, float)
    return SampledMultifunction.from_generator(args, gen, value_dim=Xs.dim)


def medial_loja(X, a, K: Domain, kind: str = "m", metric: str | None = None,
                samples: int = 1000, seed: int = 42, tol_med: float | None = None,
                region: Domain | None = None, region_samples: int = 2000) -> PowerLawFit:
    """Fit ``dist(F(x), F(a)) >= C d(x, F_*(F(a)))^alpha`` for F = m or F = N.

    For m the arguments are samples of K; for N they are the samples of X that
    lie in K (a must be a non-isolated point of X) and each N(b) is sampled on
    ``region`` (default: the bounding box of X grown by its diameter).
    """
    Xs = ClosedSetSample.of(X)
    if kind == "m":
        metric = metric or "hausdorff"
        pts = K.sample(samples, seed).interior
        F = m_multifunction(Xs, pts, tol_med).with_point(a)
        return multifun_loja_fit(F, a, K, "upper", metric)
    if kind == "N":
        metric = metric or "kuratowski"
        a = _snap(Xs, a)
        others = np.linalg.norm(Xs.points - a, axis=1)
        if Xs.points.shape[0] < 2 or np.sort(others)[1] > max(4 * Xs.pitch, TOL_PT) or Xs.pitch == 0:
            raise IsolatedPointError("N is not outer semicontinuous at an isolated point of X")
        if region is None:
            lo, hi = Xs.points.min(axis=0), Xs.points.max(axis=0)
            span = float(np.max(hi - lo))
            region = Domain(np.column_stack([lo - span, hi + span]))
        R = region.sample(region_samples, seed).points
        args = Xs.points[K.contains(Xs.points)]
        F = n_multifunction(Xs, R, tol_med, args).with_point(a)
        return multifun_loja_fit(F, a, K, "upper", metric)
    raise LojaError(f"unknown kind {kind!r}; expected 'm' or 'N'")


def m_preimage_mask(X, a, P, kind: str, tol_med: float | None = None) -> np.ndarray:
    """Rows x of P in the ``kind`` preimage of ``m(a)`` under the closest-point map."""
    Xs = ClosedSetSample.of(X)
    tol = _tol(Xs, tol_med)
    F = m_multifunction(Xs, P, tol)
    return preimage_mask(F, closest_points(Xs, a, tol).points, kind)
