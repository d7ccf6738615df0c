"""Sample-based estimate of the generalized zero set f^{-1}(0)^gamma.

A point x0 belongs to the generalized zero set when some sequence x_nu in the
domain converges to x0 with f(x_nu) -> 0, even if f(x0) != 0. On a finite
sample this becomes: sample points with |f| <= eps, plus every sample of the
closed box that sits within one grid pitch of such a point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .domain import Domain
from .errors import LojaError
from .expr import PiecewiseFn, evaluate_many
from .geometry import PointSet, hausdorff_ext

DEFAULT_EPS = 1e-4
DEFAULT_DELTA = 1e-2
DEFAULT_SAMPLES = 10_000


@dataclass(frozen=True)
class ZeroSetEstimate:
    points: PointSet
    representatives: PointSet
    witnesses: np.ndarray  # row i: witness sample for points[i]
    witness_values: np.ndarray  # |f| at that witness
    eps: float
    delta: float
    n_samples: int
    pitch: float

    @property
    def is_empty(self) -> bool:
        return self.points.is_empty

    def hausdorff_to(self, other, ambient_diam: float) -> float:
        return hausdorff_ext(self.points, other, ambient_diam)

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "delta": self.delta,
            "samples": self.n_samples,
            "pitch": self.pitch,
            "n_points": len(self.points),
            "representatives": self.representatives.points.tolist(),
            "points": self.points.points.tolist(),
            "witnesses": [
                {"x": w.tolist(), "abs_f": float(v)}
                for w, v in zip(self.witnesses, self.witness_values)
            ],
        }


def cluster_labels(P: np.ndarray, radius: float) -> np.ndarray:
    """Single-linkage clusters: points within ``radius`` share a label."""
    n = P.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int)
    pairs = cKDTree(P).query_pairs(radius, output_type="ndarray")
    adj = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(adj, directed=False)
    return labels


def cluster_representatives(P: np.ndarray, radius: float) -> np.ndarray:
    """Lexicographically smallest member of every single-linkage cluster."""
    if P.shape[0] == 0:
        return P
    labels = cluster_labels(P, radius)
    order = np.lexsort(P.T[::-1])
    reps = {}
    for i in order:
        reps.setdefault(labels[i], i)
    idx = sorted(reps.values(), key=lambda i: tuple(P[i]))
    return P[idx]


def gamma_zero_set(
    f: PiecewiseFn,
    D: Domain,
    eps: float = DEFAULT_EPS,
    delta: float = DEFAULT_DELTA,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 42,
) -> ZeroSetEstimate:
    if not eps > 0:
        raise LojaError(f"eps must be positive, got {eps}")
    if not delta > 0:
        raise LojaError(f"delta must be positive, got {delta}")
    S = D.sample(samples, seed)
    vals = np.abs(evaluate_many(f, S.points, strict=False, on_error="nan"))
    qual = S.inside & np.isfinite(vals) & (vals <= eps)
    Q = S.points[qual]
    qvals = vals[qual]
    if Q.shape[0] == 0:
        empty = PointSet.empty(D.dim)
        return ZeroSetEstimate(empty, empty, np.empty((0, D.dim)), np.empty(0),
                               eps, delta, S.points.shape[0], S.pitch)

    reach = min(S.pitch, delta) * (1 + 1e-9) if S.pitch > 0 else 0.0
    tree = cKDTree(Q)
    dist, nearest = tree.query(S.points, k=1)
    near = dist <= reach
    # qualifying points witness themselves (distance 0)
    cand = S.points[near]
    wit_idx = nearest[near]
    order = np.lexsort(cand.T[::-1])
    cand, wit_idx = cand[order], wit_idx[order]
    pts = PointSet(cand, dim=D.dim)
    # dedupe may drop rows; re-attach witnesses by nearest candidate
    _, keep_rows = cKDTree(cand).query(pts.points, k=1)
    wit_idx = wit_idx[keep_rows]
    reps = PointSet(cluster_representatives(pts.points, delta), dim=D.dim)
    return ZeroSetEstimate(pts, reps, Q[wit_idx], qvals[wit_idx], eps, delta,
                           S.points.shape[0], S.pitch)


def inclusion_check(est: ZeroSetEstimate, g: PiecewiseFn, tol_incl: float = 1e-9):
    """Test ``f^{-1}(0)^gamma  subset of  g^{-1}(0)`` on the estimate.

    Returns ``(holds, offenders)`` where offenders are candidate points with
    ``|g| > tol_incl`` or where g is undefined.
    """
    if est.is_empty:
        return True, np.empty((0, est.points.dim))
    gv = np.abs(evaluate_many(g, est.points.points, strict=False, on_error="nan"))
    bad = ~(gv <= tol_incl)
    return not bad.any(), est.points.points[bad]
