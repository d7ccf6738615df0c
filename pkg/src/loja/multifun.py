"""Sampled multifunctions: Kuratowski limits, semicontinuity, preimages and
the multifunction Lojasiewicz harness."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .config import SPHERE_DIAM, TOL_PT
from .domain import Domain
from .errors import IsolatedPointError, LojaError, NotInDomainError
from .expr import PiecewiseFn, evaluate_many
from .geometry import PointSet, hausdorff, kuratowski_dist
from .lojafit import PowerLawFit, fit_values

KINDS = ("strong", "lower", "upper", "weak")
METRICS = ("hausdorff", "kuratowski")
TOL_CLUSTER = 1e-2
MIN_SHELL = 4


def default_radii(r0: float = 0.5, levels: int = 13) -> np.ndarray:
    return r0 * 0.5 ** np.arange(levels)


# ---------------------------------------------------------------------------
# small-set predicates on raw (k, n) arrays


def _subset(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    if A.shape[0] == 0:
        return True
    if B.shape[0] == 0:
        return False
    return bool(np.all(kernels.min_dists(A, B) <= tol))


def _equal(A, B, tol) -> bool:
    return _subset(A, B, tol) and _subset(B, A, tol)


def _meets(A, B, tol) -> bool:
    if A.shape[0] == 0 or B.shape[0] == 0:
        return False
    return bool(np.any(kernels.min_dists(A, B) <= tol))


def leader_cluster(V: np.ndarray, tol: float, presorted: bool = False) -> np.ndarray:
    """Greedy leader clustering; returns the leaders in lexicographic order.

    Rows are visited in lexicographic order unless ``presorted``, in which case
    the given order decides who leads (callers put the most reliable rows first).
    """
    if V.shape[0] == 0:
        return V
    if not presorted:
        V = V[np.lexsort(V.T[::-1])]
    leaders = [V[0]]
    for v in V[1:]:
        if np.min(np.linalg.norm(np.asarray(leaders) - v, axis=1)) > tol:
            leaders.append(v)
    L = np.asarray(leaders)
    return L[np.lexsort(L.T[::-1])]


# ---------------------------------------------------------------------------


class SampledMultifunction:
    """``F: R^m -> finite subsets of R^n`` known on a finite set of arguments.

    ``generator`` (optional) maps a point to its value array and is used to
    evaluate F off the stored samples.
    """

    def __init__(self, points, values: Sequence, value_dim: int | None = None,
                 generator: Callable[[np.ndarray], np.ndarray] | None = None,
                 tol: float = TOL_PT):
        X = np.asarray(points, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[0] != len(values):
            raise LojaError("one value set per domain sample is required")
        vals = []
        for v in values:
            v = np.asarray(v, dtype=float)
            if v.size == 0:
                v = np.empty((0, value_dim or 1))
            elif v.ndim == 1:
                v = v.reshape(-1, value_dim or 1)
            vals.append(PointSet(v, tol=tol).points)
        n = value_dim or next((v.shape[1] for v in vals if v.shape[0]), 1)
        if any(v.shape[0] and v.shape[1] != n for v in vals):
            raise LojaError("value sets have mixed dimensions")
        self.points = X
        self.values = vals
        self.value_dim = n
        self.generator = generator
        self.tol = tol
        self.in_dom = np.array([v.shape[0] > 0 for v in vals], dtype=bool)

    @classmethod
    def from_generator(cls, points, generator, value_dim: int = 1, tol: float = TOL_PT):
        X = np.asarray(points, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        return cls(X, [generator(x) for x in X], value_dim, generator, tol)

    @classmethod
    def from_branches(cls, branches: Sequence[PiecewiseFn], points, tol: float = TOL_PT):
        """``F(x)`` = set of values of the branches that are defined at ``x``."""
        X = np.asarray(points, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        V = np.column_stack([evaluate_many(b, X, strict=False, on_error="nan") for b in branches])
        vals = [row[np.isfinite(row)].reshape(-1, 1) for row in V]

        def gen(x, _b=tuple(branches)):
            x = np.asarray(x, dtype=float).reshape(1, -1)
            r = np.array([evaluate_many(b, x, strict=False, on_error="nan")[0] for b in _b])
            return r[np.isfinite(r)].reshape(-1, 1)

        return cls(X, vals, 1, gen, tol)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def value_at(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float).reshape(-1)
        if self.generator is not None:
            v = np.asarray(self.generator(a), dtype=float)
            return PointSet(v.reshape(-1, self.value_dim) if v.size else
                            np.empty((0, self.value_dim)), tol=self.tol).points
        d = np.linalg.norm(self.points - a, axis=1)
        i = int(np.argmin(d))
        if d[i] > self.tol:
            raise NotInDomainError(f"{a.tolist()} is not a stored sample and F has no generator")
        return self.values[i]

    def with_point(self, a) -> "SampledMultifunction":
        """Same multifunction with ``a`` added to the samples if it is missing."""
        a = np.asarray(a, dtype=float).reshape(-1)
        if np.min(np.linalg.norm(self.points - a, axis=1), initial=np.inf) <= self.tol:
            return self
        return SampledMultifunction(np.vstack([self.points, a]), self.values + [self.value_at(a)],
                                    self.value_dim, self.generator, self.tol)

    def to_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for x, v in zip(self.points, self.values):
                fh.write(json.dumps({"x": x.tolist(), "values": v.tolist()}) + "\n")

    @classmethod
    def from_jsonl(cls, path, tol: float = TOL_PT) -> "SampledMultifunction":
        xs, vs = [], []
        for line in Path(path).read_text().splitlines():
            if line.strip():
                rec = json.loads(line)
                xs.append(rec["x"])
                vs.append(rec["values"])
        if not xs:
            raise LojaError(f"{path}: no samples")
        n = next((len(v[0]) for v in vs if v), 1)
        return cls(np.asarray(xs, dtype=float), vs, n, None, tol)


# ---------------------------------------------------------------------------
# Kuratowski limits and semicontinuity


@dataclass(frozen=True)
class LimitEstimate:
    liminf: PointSet
    limsup: PointSet
    radii: tuple[float, ...]
    radius_used: float
    shell_size: int
    converged: bool


def _ball(F: SampledMultifunction, a: np.ndarray, r: float) -> np.ndarray:
    d = np.linalg.norm(F.points - a, axis=1)
    return np.flatnonzero(F.in_dom & (d > F.tol) & (d <= r))


def _shell_limits(F, idx, tol_cluster, a):
    if idx.size == 0:
        return np.empty((0, F.value_dim)), np.empty((0, F.value_dim))
    # samples nearest to a give the best approximations of limit values
    near_first = idx[np.argsort(np.linalg.norm(F.points[idx] - a, axis=1), kind="stable")]
    allv = np.vstack([F.values[i] for i in near_first])
    sup = leader_cluster(allv, tol_cluster, presorted=True)
    worst = np.zeros(sup.shape[0])
    for i in idx:
        worst = np.maximum(worst, kernels.min_dists(sup, F.values[i]))
    inf = sup[worst <= tol_cluster]
    return inf, sup


def kuratowski_limits(F: SampledMultifunction, a, radii=None, tol_cluster: float = TOL_CLUSTER,
                      tol_lim: float | None = None, min_shell: int = MIN_SHELL) -> LimitEstimate:
    """Estimate ``liminf`` and ``limsup`` of ``F(x)`` as ``x -> a`` over shrinking balls.

    The estimate is read from the smallest ball that still holds at least
    ``min_shell`` samples of dom F other than ``a`` (or the smallest nonempty
    ball if none does). ``converged`` compares it with the next larger ball.
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    radii = default_radii() if radii is None else np.asarray(radii, dtype=float)
    radii = np.sort(radii)[::-1]
    tol_lim = tol_cluster if tol_lim is None else tol_lim
    balls = [_ball(F, a, r) for r in radii]
    nonempty = [k for k, b in enumerate(balls) if b.size]
    if not nonempty:
        raise IsolatedPointError(f"no sample of dom F within {radii[0]:g} of {a.tolist()}")
    full = [k for k in nonempty if balls[k].size >= min_shell]
    k = full[-1] if full else nonempty[-1]
    inf, sup = _shell_limits(F, balls[k], tol_cluster, a)
    converged = False
    if k > 0:
        inf0, sup0 = _shell_limits(F, balls[k - 1], tol_cluster, a)
        ps = lambda A: PointSet(A, dim=F.value_dim)  # noqa: E731
        dsup = _hext(ps(sup), ps(sup0))
        dinf = _hext(ps(inf), ps(inf0))
        converged = max(dsup, dinf) <= tol_lim
    return LimitEstimate(PointSet(inf, dim=F.value_dim), PointSet(sup, dim=F.value_dim),
                         tuple(float(r) for r in radii), float(radii[k]), int(balls[k].size),
                         converged)


def _hext(A: PointSet, B: PointSet) -> float:
    if A.is_empty and B.is_empty:
        return 0.0
    if A.is_empty or B.is_empty:
        return np.inf
    return hausdorff(A, B)


def classify_semicontinuity(F: SampledMultifunction, a, radii=None,
                            tol_cluster: float = TOL_CLUSTER) -> dict:
    """Flags of outer/inner/upper/lower semicontinuity and continuity at ``a``."""
    Fa = F.value_at(a)
    if Fa.shape[0] == 0:
        raise NotInDomainError(f"{np.asarray(a).tolist()} is not in dom F")
    lim = kuratowski_limits(F, a, radii, tol_cluster)
    sup, inf = lim.limsup.points, lim.liminf.points
    outer = _subset(sup, Fa, tol_cluster)
    inner = _subset(Fa, inf, tol_cluster)
    upper = outer and _subset(Fa, sup, tol_cluster)
    lower = inner and _subset(inf, Fa, tol_cluster)
    return {
        "outer": outer,
        "inner": inner,
        "upper": upper,
        "lower": lower,
        "continuous": upper and lower,
        "limits": lim,
    }


# ---------------------------------------------------------------------------
# preimages


def preimage_mask(F: SampledMultifunction, Fa: np.ndarray, kind: str) -> np.ndarray:
    if kind not in KINDS:
        raise LojaError(f"unknown preimage kind {kind!r}; expected one of {KINDS}")
    tol = F.tol
    test = {
        "strong": lambda V: _equal(V, Fa, tol),
        "lower": lambda V: _subset(V, Fa, tol),
        "upper": lambda V: _subset(Fa, V, tol),
        "weak": lambda V: _meets(V, Fa, tol),
    }[kind]
    return np.array([dom and test(V) for dom, V in zip(F.in_dom, F.values)], dtype=bool)


def preimage(F: SampledMultifunction, a, kind: str) -> PointSet:
    """Samples x of dom F with F(x) = F(a), F(x) in F(a), F(a) in F(x) or F(x) meeting F(a)."""
    Fa = F.value_at(a)
    if Fa.shape[0] == 0:
        raise NotInDomainError(f"{np.asarray(a).tolist()} is not in dom F")
    G = F.with_point(a)
    mask = preimage_mask(G, Fa, kind)
    return PointSet(G.points[mask], dim=G.dim, tol=G.tol)


# ---------------------------------------------------------------------------
# Lojasiewicz harness


def set_distance(A: np.ndarray, B: np.ndarray, metric: str) -> float:
    if metric == "hausdorff":
        if A.shape[0] == 0 or B.shape[0] == 0:
            return (0.0 if A.shape[0] == B.shape[0] else np.inf)
        return hausdorff(PointSet(A), PointSet(B))
    if metric == "kuratowski":
        if A.shape[0] == 0 and B.shape[0] == 0:
            return 0.0
        if A.shape[0] == 0 or B.shape[0] == 0:
            return SPHERE_DIAM + 1.0
        return kuratowski_dist(PointSet(A), PointSet(B))
    raise LojaError(f"unknown metric {metric!r}; expected one of {METRICS}")


def multifun_pairs(F: SampledMultifunction, a, K: Domain | None, kind: str,
                   metric: str = "hausdorff"):
    """Sample points x of K with the pair ``dist(F(x), F(a))``, ``d(x, preimage)``."""
    Fa = F.value_at(a)
    if Fa.shape[0] == 0:
        raise NotInDomainError(f"{np.asarray(a).tolist()} is not in dom F")
    pre = preimage(F, a, kind)
    a_arr = np.asarray(a, dtype=float).reshape(1, -1)
    assert kernels.min_dists(a_arr, pre.points)[0] <= F.tol, "a must lie in its own preimage"
    sel = F.in_dom.copy()
    if K is not None:
        sel &= K.contains(F.points)
    X = F.points[sel]
    if X.shape[0] == 0:
        raise LojaError("no sample of dom F inside K")
    fv = np.array([set_distance(F.values[i], Fa, metric) for i in np.flatnonzero(sel)])
    gv = kernels.min_dists(X, pre.points)
    return X, fv, gv


def multifun_loja_fit(F: SampledMultifunction, a, K: Domain | None, kind: str = "upper",
                      metric: str = "hausdorff", **kw) -> PowerLawFit:
    """Fit ``dist(F(x), F(a)) >= C d(x, preimage)^alpha`` over the samples in K."""
    X, fv, gv = multifun_pairs(F, a, K, kind, metric)
    return fit_values(fv, gv, X, **kw)
