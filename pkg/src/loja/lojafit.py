"""Empirical power-law Lojasiewicz envelopes ``|f| >= C |g|^alpha`` on samples.

The fit works in log space, ``u = log|g|`` and ``v = log|f|``. For a given
alpha the envelope constant is ``C(alpha) = exp(min(v - alpha*u))``. On a
finite sample ``C(alpha)`` is positive for every alpha, so positivity alone
cannot tell a valid exponent from one that only looks valid because the
sample stops short of ``g = 0``. An exponent is accepted when the envelope is
*tail-stable*: the samples with the smallest ``|g|`` (lowest decile of u) do
not push ``min(v - alpha*u)`` more than ``tau`` below its value on the next
decile. Comparing adjacent deciles, rather than the tail against everything,
keeps a deep minimum far from ``g = 0`` from hiding a decaying tail. The
reported alpha is the smallest accepted one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import C_FLOOR, TOL_G, tol_fit
from .domain import Domain
from .errors import LojaError
from .expr import PiecewiseFn, evaluate_many

ALPHA_MIN = 0.05
ALPHA_MAX = 40.0
ALPHA_GRID = 400
ALPHA_RTOL = 1e-3
TAIL_TAU = 1e-3
TAIL_QUANTILE = 0.1
BOUND_PROBE = 1e6
EPS_STAR = 1e-3
C_GAP = 0.1
MAX_N = 64


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    C: float
    feasible: bool
    n_samples: int
    min_residual: float
    binding_points: np.ndarray
    flags: tuple[str, ...] = ()
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "alpha": _num(self.alpha),
            "C": _num(self.C),
            "feasible": bool(self.feasible),
            "n_samples": int(self.n_samples),
            "min_residual": _num(self.min_residual),
            "binding_points": np.asarray(self.binding_points).tolist(),
            "flags": list(self.flags),
            "reason": self.reason,
        }


def _num(x):
    x = float(x)
    return x if np.isfinite(x) else None


@dataclass(frozen=True)
class PowerPhi:
    """``phi(t) = sign(t) * C * |t|^alpha``, p-flat at 0 when ``alpha >= p + 1``."""

    C: float
    alpha: float
    p: int = 1

    def __post_init__(self):
        if not self.C > 0:
            raise LojaError(f"phi needs C > 0, got {self.C}")
        if self.p < 0:
            raise LojaError(f"flatness order must be >= 0, got {self.p}")
        if self.alpha < self.p + 1:
            raise LojaError(f"alpha={self.alpha} is below p+1={self.p + 1}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.sign(t) * self.C * np.abs(t) ** self.alpha


@dataclass(frozen=True)
class ValuePairCloud:
    s: np.ndarray
    t: np.ndarray
    points: np.ndarray

    def __len__(self) -> int:
        return self.s.shape[0]


@dataclass(frozen=True)
class ViolationReport:
    points: np.ndarray
    lhs: np.ndarray  # |phi(g)|
    rhs: np.ndarray  # |f|
    n_samples: int

    @property
    def ok(self) -> bool:
        return self.points.shape[0] == 0


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    value: float  # sup|g| or decile max |f|
    witness: np.ndarray | None = None
    witness_value: float | None = None
    detail: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


# ---------------------------------------------------------------------------
# sampling helpers


def sample_pair(f: PiecewiseFn, g: PiecewiseFn, D: Domain, samples: int, seed: int):
    """Points of ``D`` (guard applied) where both f and g are defined, with values."""
    S = D.sample(samples, seed)
    X = S.interior
    fv = evaluate_many(f, X, strict=False, on_error="nan")
    gv = evaluate_many(g, X, strict=False, on_error="nan")
    ok = np.isfinite(fv) & np.isfinite(gv)
    if not ok.any():
        raise LojaError("no sample point where both functions are defined")
    return X[ok], fv[ok], gv[ok]


def _sample_one(g: PiecewiseFn, D: Domain, samples: int, seed: int):
    S = D.sample(samples, seed)
    X = S.interior
    gv = evaluate_many(g, X, strict=False, on_error="nan")
    ok = np.isfinite(gv)
    return X[ok], gv[ok]


# ---------------------------------------------------------------------------
# envelope machinery


def _tail_split(u: np.ndarray):
    """Masks of the lowest and second-lowest deciles of ``u``, or None if degenerate."""
    if u.size < 2 or np.ptp(u) < 1e-12:
        return None
    q1, q2 = np.quantile(u, [TAIL_QUANTILE, 2 * TAIL_QUANTILE])
    tail = u <= q1
    ref = (u > q1) & (u <= q2)
    if not ref.any():
        ref = ~tail
    if not tail.any() or not ref.any():
        return None
    return tail, ref


def _envelope_ok(u, v, split, alpha, tau) -> bool:
    w = v - alpha * u
    if np.exp(w.min()) < C_FLOOR:
        return False
    if split is None:
        return True
    tail, ref = split
    return w[tail].min() >= w[ref].min() - tau


def _search_alpha(u, v, split, tau, alpha_min, alpha_max, n_grid) -> float | None:
    grid = np.geomspace(alpha_min, alpha_max, n_grid)
    ok = [_envelope_ok(u, v, split, a, tau) for a in grid]
    if not any(ok):
        return None
    i = ok.index(True)
    if i == 0:
        return float(grid[0])
    lo, hi = float(grid[i - 1]), float(grid[i])
    while (hi - lo) > ALPHA_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if _envelope_ok(u, v, split, mid, tau):
            hi = mid
        else:
            lo = mid
    return hi


def _binding(X, ratio_log, best, limit=10):
    idx = np.flatnonzero(ratio_log <= best + 1e-9)[:limit]
    return X[idx]


def fit_values(
    fv,
    gv,
    X=None,
    *,
    tau: float = TAIL_TAU,
    alpha_min: float = ALPHA_MIN,
    alpha_max: float = ALPHA_MAX,
    n_grid: int = ALPHA_GRID,
    bound_probe: float | None = BOUND_PROBE,
) -> PowerLawFit:
    """Envelope fit of ``|f| >= C |g|^alpha`` from sampled values."""
    af = np.abs(np.asarray(fv, dtype=float)).ravel()
    ag = np.abs(np.asarray(gv, dtype=float)).ravel()
    if af.shape != ag.shape:
        raise LojaError("f and g samples differ in length")
    n = af.size
    if X is None:
        X = np.arange(n, dtype=float).reshape(-1, 1)
    X = np.asarray(X, dtype=float).reshape(n, -1)
    keep = np.isfinite(af) & np.isfinite(ag)
    af, ag, X = af[keep], ag[keep], X[keep]
    if af.size == 0:
        raise LojaError("no finite samples to fit")
    empty = np.empty((0, X.shape[1]))

    if bound_probe is not None and ag.max() > bound_probe:
        return PowerLawFit(np.nan, 0.0, False, n, np.nan, X[[int(np.argmax(ag))]],
                           ("g_unbounded",), f"sup|g| = {ag.max():.6g} exceeds {bound_probe:g}")
    pos = ag > TOL_G
    if not pos.any():
        fmin = float(af.min())
        C = fmin if fmin > 0 else 1.0
        return PowerLawFit(1.0, C, True, n, float(np.min(af - C * ag)), empty,
                           ("degenerate",), "g vanishes on every sample")
    zero_f = pos & (af == 0)
    if zero_f.any():
        return PowerLawFit(np.nan, 0.0, False, n, np.nan, X[zero_f][:10],
                           ("f_zero_where_g_positive",), "f vanishes where g does not")

    u, v = np.log(ag[pos]), np.log(af[pos])
    split = _tail_split(u)
    alpha = _search_alpha(u, v, split, tau, alpha_min, alpha_max, n_grid)
    if alpha is None:
        return PowerLawFit(np.nan, 0.0, False, n, np.nan, empty, ("no_alpha",),
                           f"no alpha in [{alpha_min:g}, {alpha_max:g}] gives a stable envelope")
    w = v - alpha * u
    best = float(w.min())
    C = float(np.exp(best))
    resid = af - C * ag**alpha
    return PowerLawFit(alpha, C, True, n, float(resid.min()), _binding(X[pos], w, best))


def fit_exponent(f, g, D: Domain, samples: int = 10_000, seed: int = 42, **kw) -> PowerLawFit:
    X, fv, gv = sample_pair(f, g, D, samples, seed)
    return fit_values(fv, gv, X, **kw)


def reverse_fit_values(fv, gv, X=None, *, tau: float = TAIL_TAU, max_n: int = MAX_N) -> PowerLawFit:
    """Smallest integer N >= 1 with ``|f|^N <= C |g|`` stable as ``g -> 0``."""
    af = np.abs(np.asarray(fv, dtype=float)).ravel()
    ag = np.abs(np.asarray(gv, dtype=float)).ravel()
    n = af.size
    X = np.arange(n, dtype=float).reshape(-1, 1) if X is None else np.asarray(X, float).reshape(n, -1)
    keep = np.isfinite(af) & np.isfinite(ag)
    af, ag, X = af[keep], ag[keep], X[keep]
    bad = (ag <= TOL_G) & (af > TOL_G)
    if bad.any():
        return PowerLawFit(np.nan, np.inf, False, n, np.nan, X[bad][:10],
                           ("g_zero_where_f_positive",), "g vanishes where f does not")
    pos = ag > TOL_G
    if not pos.any():
        return PowerLawFit(1.0, 1.0, True, n, 0.0, np.empty((0, X.shape[1])), ("degenerate",),
                           "f and g vanish on every sample")
    fz = af[pos] <= 0
    u = np.log(ag[pos])
    with np.errstate(divide="ignore"):
        lf = np.log(af[pos])
    split = _tail_split(u)
    for N in range(1, max_n + 1):
        w = np.where(fz, -np.inf, N * lf - u)  # log(|f|^N / |g|)
        if split is None or w[split[0]].max() <= w[split[1]].max() + tau:
            top = float(w.max())
            C = float(np.exp(top))
            resid = C * ag - af**N
            return PowerLawFit(float(N), C, True, n, float(resid.min()), _binding(X[pos], -w, -top))
    return PowerLawFit(np.nan, np.inf, False, n, np.nan, np.empty((0, X.shape[1])), ("no_N",),
                       f"no integer N <= {max_n} gives a stable bound")


def reverse_fit(f, g, D: Domain, samples: int = 10_000, seed: int = 42, **kw) -> PowerLawFit:
    X, fv, gv = sample_pair(f, g, D, samples, seed)
    return reverse_fit_values(fv, gv, X, **kw)


# ---------------------------------------------------------------------------
# inequality checks


def verify_inequality(f, g, D: Domain, phi: PowerPhi, samples: int = 10_000, seed: int = 42,
                      tol: float | None = None) -> ViolationReport:
    tol = tol_fit() if tol is None else tol
    X, fv, gv = sample_pair(f, g, D, samples, seed)
    lhs = np.abs(phi(gv))
    rhs = np.abs(fv)
    bad = lhs > rhs + tol
    return ViolationReport(X[bad], lhs[bad], rhs[bad], X.shape[0])


def star_check_values(fv, gv, X, c_gap: float = C_GAP, eps_star: float = EPS_STAR) -> CheckResult:
    """Sequence condition ``f(x_n) -> 0  =>  g(x_n) -> 0`` on a sample.

    The probe set is the smallest decile of ``|f|`` (ties included). The check
    fails when that decile reaches ``|f| <= eps_star`` yet still contains a
    point with ``|g| >= c_gap``.
    """
    if not c_gap > 0:
        raise LojaError("c_gap must be positive")
    af, ag = np.abs(np.asarray(fv, float)), np.abs(np.asarray(gv, float))
    X = np.asarray(X, float).reshape(af.size, -1)
    k = max(1, int(np.ceil(TAIL_QUANTILE * af.size)))
    thresh = np.partition(af, k - 1)[k - 1]
    probe = np.flatnonzero(af <= thresh)
    dmax = float(af[probe].max())
    j = probe[np.argmax(ag[probe])]
    gmax = float(ag[j])
    failed = dmax <= eps_star and gmax >= c_gap
    detail = {"decile_size": int(probe.size), "c_gap": c_gap, "eps_star": eps_star,
              "probe_max_g": gmax}
    return CheckResult(not failed, dmax, X[j], gmax, detail)


def check_star_condition(f, g, D: Domain, samples: int = 10_000, seed: int = 42,
                         c_gap: float = C_GAP, eps_star: float = EPS_STAR) -> CheckResult:
    X, fv, gv = sample_pair(f, g, D, samples, seed)
    return star_check_values(fv, gv, X, c_gap, eps_star)


def check_g_bounded(g, D: Domain, samples: int = 10_000, seed: int = 42,
                    bound_probe: float = BOUND_PROBE) -> CheckResult:
    if not bound_probe > 0:
        raise LojaError("bound_probe must be positive")
    X, gv = _sample_one(g, D, samples, seed)
    if gv.size == 0:
        return CheckResult(True, 0.0)
    ag = np.abs(gv)
    j = int(np.argmax(ag))
    sup = float(ag[j])
    return CheckResult(sup <= bound_probe, sup, X[j], sup, {"bound_probe": bound_probe})


# ---------------------------------------------------------------------------
# value-pair cloud and regular separation


def value_pair_cloud(f, g, D: Domain, samples: int = 10_000, seed: int = 42) -> ValuePairCloud:
    X, fv, gv = sample_pair(f, g, D, samples, seed)
    return ValuePairCloud(fv, gv, X)


def separation_fit(cloud: ValuePairCloud, **kw) -> PowerLawFit:
    """Fit ``|s| >= C (|s| + |t|)^alpha`` over the cloud (1-norm on the plane)."""
    if len(cloud) == 0:
        raise LojaError("empty value-pair cloud")
    s, t = np.abs(cloud.s), np.abs(cloud.t)
    kw.setdefault("bound_probe", None)
    return fit_values(s, s + t, np.column_stack([cloud.s, cloud.t]), **kw)


# ---------------------------------------------------------------------------
# selector: pointwise min of finitely many odd bijections


def min_selector(phis: Sequence[PiecewiseFn], eps_scan: float = 1.0, n_t: int = 401,
                 eps_floor: float = 1e-8, tol: float | None = None) -> tuple[int, float]:
    """Index ``i0`` and radius ``eps`` with ``sign(t) min_i |phi_i(t)| = phi_i0(t)`` on ``[-eps, eps]``."""
    if not phis:
        raise LojaError("need at least one function")
    tol = tol_fit() if tol is None else tol
    t0 = np.linspace(0.0, eps_scan, n_t)[1:]
    for i, phi in enumerate(phis):
        pos = evaluate_many(phi, t0)
        neg = evaluate_many(phi, -t0)
        if np.any(np.abs(pos + neg) > tol * np.maximum(1.0, np.abs(pos))):
            raise LojaError(f"function {i} is not odd on [-{eps_scan:g}, {eps_scan:g}]")
        if abs(evaluate_many(phi, np.zeros(1))[0]) > tol:
            raise LojaError(f"function {i} does not vanish at 0")
    eps = eps_scan
    while eps >= eps_floor:
        t = np.linspace(-eps, eps, n_t)
        V = np.vstack([evaluate_many(phi, t) for phi in phis])
        env = np.sign(t) * np.abs(V).min(axis=0)
        for i in range(len(phis)):
            if np.all(np.abs(V[i] - env) <= tol * np.abs(V[i]) + 1e-300):
                return i, float(eps)
        eps *= 0.5
    raise LojaError(f"no selector found down to eps = {eps_floor:g}")
