"""Finite point sets with Hausdorff-type metrics, including the stereographic one."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .config import SPHERE_DIAM, TOL_POLE, TOL_PT
from .errors import DimensionError, EmptySetError, PoleError

TOL_SPHERE = 1e-9


def _dedupe(P: np.ndarray, tol: float) -> np.ndarray:
    """Drop points within ``tol`` of an earlier kept point (first occurrence wins)."""
    if P.shape[0] < 2:
        return P
    tree = cKDTree(P)
    pairs = tree.query_pairs(tol, output_type="ndarray")
    if pairs.size == 0:
        return P
    keep = np.ones(P.shape[0], dtype=bool)
    neighbours: dict[int, list[int]] = {}
    for i, j in pairs:
        neighbours.setdefault(int(i), []).append(int(j))
        neighbours.setdefault(int(j), []).append(int(i))
    for i in range(P.shape[0]):
        if not keep[i]:
            continue
        for j in neighbours.get(i, ()):
            if j > i:
                keep[j] = False
    return P[keep]


class PointSet:
    """Finite subset of R^n; no two stored points lie within ``tol`` of each other."""

    __slots__ = ("points", "tol")

    def __init__(self, points, dim: int | None = None, tol: float = TOL_PT):
        P = np.asarray(points, dtype=float)
        if P.size == 0:
            if dim is None:
                dim = P.shape[1] if P.ndim == 2 else 0
            P = np.empty((0, dim))
        else:
            if P.ndim == 1:
                P = P.reshape(-1, 1) if dim in (None, 1) else P.reshape(-1, dim)
            if P.ndim != 2:
                raise DimensionError(f"expected a 2-d array of points, got shape {P.shape}")
            if dim is not None and P.shape[1] != dim:
                raise DimensionError(f"points have dimension {P.shape[1]}, expected {dim}")
            if not np.all(np.isfinite(P)):
                raise DimensionError("point coordinates must be finite")
            P = _dedupe(np.ascontiguousarray(P), tol)
        P.setflags(write=False)
        self.points = P
        self.tol = tol

    @classmethod
    def empty(cls, dim: int) -> "PointSet":
        return cls(np.empty((0, dim)), dim=dim)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __bool__(self) -> bool:
        return len(self) > 0

    def __repr__(self) -> str:
        return f"PointSet(n={self.dim}, size={len(self)})"

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    def contains(self, x) -> bool:
        if self.is_empty:
            return False
        return dist_point_set(x, self) <= self.tol

    def subset_of(self, other: "PointSet") -> bool:
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        _check_dims(self, other)
        return bool(np.all(kernels.min_dists(self.points, other.points) <= self.tol))

    def equals(self, other: "PointSet") -> bool:
        return self.subset_of(other) and other.subset_of(self)

    def intersects(self, other: "PointSet") -> bool:
        if self.is_empty or other.is_empty:
            return False
        _check_dims(self, other)
        return bool(np.any(kernels.min_dists(self.points, other.points) <= self.tol))

    def union(self, other: "PointSet") -> "PointSet":
        _check_dims(self, other)
        return PointSet(np.vstack([self.points, other.points]), dim=self.dim, tol=self.tol)

    def sorted(self) -> "PointSet":
        order = np.lexsort(self.points.T[::-1]) if len(self) else np.arange(0)
        return PointSet(self.points[order], dim=self.dim, tol=self.tol)

    def to_csv(self, path) -> None:
        lines = [f"# dim={self.dim}"]
        lines += [",".join(repr(float(v)) for v in p) for p in self.points]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path, dim: int | None = None) -> "PointSet":
        rows = []
        for raw in Path(path).read_text().splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key = line[1:].strip()
                if key.startswith("dim="):
                    d = int(key[4:])
                    if dim is not None and d != dim:
                        raise DimensionError(f"file declares dim={d}, expected {dim}")
                    dim = d
                continue
            rows.append([float(v) for v in line.split(",")])
        if not rows:
            return cls.empty(dim if dim is not None else 1)
        return cls(np.array(rows), dim=dim)


def as_pointset(A, dim: int | None = None) -> PointSet:
    return A if isinstance(A, PointSet) else PointSet(A, dim=dim)


def _check_dims(A: PointSet, B: PointSet) -> None:
    if A.dim != B.dim:
        raise DimensionError(f"dimension mismatch: {A.dim} vs {B.dim}")


def dist_point_set(x, A) -> float:
    """Euclidean distance from ``x`` to the finite set ``A``."""
    A = as_pointset(A)
    if A.is_empty:
        raise EmptySetError("distance to the empty set is undefined")
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    if x.shape[1] != A.dim:
        raise DimensionError(f"point has dimension {x.shape[1]}, set has {A.dim}")
    return float(kernels.min_dists(x, A.points)[0])


def dists_to_set(X, A) -> np.ndarray:
    """Vectorized ``dist_point_set`` over the rows of ``X``."""
    A = as_pointset(A)
    if A.is_empty:
        raise EmptySetError("distance to the empty set is undefined")
    X = np.asarray(X, dtype=float).reshape(-1, A.dim)
    return kernels.min_dists(X, A.points)


def hausdorff(A, B) -> float:
    A, B = as_pointset(A), as_pointset(B)
    if A.is_empty or B.is_empty:
        raise EmptySetError("hausdorff needs nonempty sets; use hausdorff_ext")
    _check_dims(A, B)
    return max(kernels.directed_hausdorff(A.points, B.points),
               kernels.directed_hausdorff(B.points, A.points))


def hausdorff_ext(A, B, ambient_diam: float) -> float:
    """Hausdorff metric extended to the empty set: ``diam + 1`` when exactly one is empty."""
    if ambient_diam < 0:
        raise ValueError("ambient_diam must be nonnegative")
    A, B = as_pointset(A), as_pointset(B)
    if A.is_empty and B.is_empty:
        return 0.0
    if A.is_empty or B.is_empty:
        return float(ambient_diam) + 1.0
    return hausdorff(A, B)


def stereo_project(x) -> np.ndarray:
    """S^n minus the north pole onto R^n: ``y_i = 2 x_i / (1 - x_{n+1})``.

    Accepts one point or an array of points (rows).
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    last = X[:, -1]
    if np.any(last >= 1.0 - TOL_POLE):
        raise PoleError("cannot project the north pole (or points within tol_pole of it)")
    Y = 2.0 * X[:, :-1] / (1.0 - last)[:, None]
    return Y[0] if single else Y


def stereo_lift(y) -> np.ndarray:
    """Inverse of ``stereo_project``: ``(4y, |y|^2 - 4) / (|y|^2 + 4)``."""
    Y = np.asarray(y, dtype=float)
    single = Y.ndim == 1
    Y = np.atleast_2d(Y)
    r2 = np.sum(Y * Y, axis=1)
    denom = r2 + 4.0
    X = np.empty((Y.shape[0], Y.shape[1] + 1))
    X[:, :-1] = 4.0 * Y / denom[:, None]
    X[:, -1] = (r2 - 4.0) / denom
    return X[0] if single else X


def north_pole(n: int) -> np.ndarray:
    p = np.zeros(n + 1)
    p[-1] = 1.0
    return p


class SpherePointSet(PointSet):
    """Point set on the unit sphere S^n in R^{n+1}."""

    __slots__ = ()

    def __init__(self, points, dim: int | None = None, tol: float = TOL_PT):
        super().__init__(points, dim=dim, tol=tol)
        if len(self):
            err = np.abs(np.linalg.norm(self.points, axis=1) - 1.0)
            if np.any(err > TOL_SPHERE):
                raise DimensionError(f"point off the unit sphere by {err.max():.3g}")

    @classmethod
    def lift(cls, A: PointSet, with_pole: bool = True) -> "SpherePointSet":
        parts = [stereo_lift(A.points)] if len(A) else []
        if with_pole:
            parts.append(north_pole(A.dim)[None, :])
        P = np.vstack(parts) if parts else np.empty((0, A.dim + 1))
        return cls(P, dim=A.dim + 1)


def kuratowski_dist(K, L, dim: int | None = None) -> float:
    """Hausdorff distance of ``h(K) + {p}`` and ``h(L) + {p}`` on the sphere.

    Exactly one empty input gives ``diam S^n + 1 = 3``.
    """
    K, L = as_pointset(K, dim), as_pointset(L, dim)
    if K.is_empty and L.is_empty:
        return 0.0
    if K.is_empty or L.is_empty:
        return SPHERE_DIAM + 1.0
    _check_dims(K, L)
    return hausdorff(SpherePointSet.lift(K), SpherePointSet.lift(L))
