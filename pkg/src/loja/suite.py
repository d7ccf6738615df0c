"""Regression matrix over the worked examples.

``run_paper_suite`` evaluates every acceptance criterion (``c1`` .. ``c13``) and
returns a JSON-ready report. ``run_fixture`` produces the detailed report for
one fixture tag. Apart from the ``timings`` block, reports depend only on the
flags and the seed.
"""

from __future__ import annotations

import csv
import io
import json
import time

import numpy as np

from . import fixtures as fx
from .config import SPHERE_DIAM
from .domain import Domain
from .errors import LojaError
from .expr import evaluate_many, parse
from .geometry import PointSet, hausdorff, kuratowski_dist, stereo_lift, stereo_project
from .lojafit import (
    check_g_bounded,
    check_star_condition,
    fit_exponent,
    separation_fit,
    star_check_values,
    value_pair_cloud,
)
from .medial import (
    ClosedSetSample,
    _region_mask,
    check_closed,
    check_closed_levels,
    closest_points,
    m_preimage_mask,
    medial_axis,
    medial_loja,
    n_region,
    upper_preimage_n_mask,
    weak_preimage_n_mask,
)
from .multifun import (
    KINDS,
    SampledMultifunction,
    classify_semicontinuity,
    multifun_loja_fit,
    multifun_pairs,
    preimage,
)
from .zeroset import gamma_zero_set

SCHEMA = 1
EX49_M = (3, 5, 8, 12)
PLOT_POINTS = 400


# ---------------------------------------------------------------------------
# helpers


def clean(obj):
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else None
    return obj


def _check(passed, **info) -> dict:
    return {"passed": bool(passed), **info}


def _result(checks: dict, **extra) -> dict:
    return {"passed": all(c["passed"] for c in checks.values()), "checks": checks, **extra}


def hausdorff_to_interval(P: np.ndarray, lo: float, hi: float) -> float:
    """Exact Hausdorff distance between a finite subset of R and ``[lo, hi]``."""
    x = np.sort(np.asarray(P, dtype=float).ravel())
    if x.size == 0:
        return np.inf
    out_of = np.maximum(lo - x, x - hi).clip(min=0).max()
    inside = np.clip(x, lo, hi)
    gaps = np.diff(np.concatenate([[lo], inside, [hi]]))
    cover = max(inside[0] - lo, hi - inside[-1], (gaps[1:-1].max() / 2) if x.size > 1 else 0.0)
    return float(max(out_of, cover))


def _subsample(n: int, k: int = PLOT_POINTS) -> np.ndarray:
    return np.unique(np.linspace(0, n - 1, min(n, k)).round().astype(int)) if n else np.arange(0)


def _envelope_rows(fv, gv, fit, series: str) -> list:
    af, ag = np.abs(fv), np.abs(gv)
    ok = (af > 0) & (ag > 0)
    u, v = np.log(ag[ok]), np.log(af[ok])
    order = np.argsort(u, kind="stable")
    u, v = u[order], v[order]
    idx = _subsample(u.size)
    rows = [[u[i], v[i], f"{series}:data"] for i in idx]
    if fit.feasible:
        rows += [[u[i], np.log(fit.C) + fit.alpha * u[i], f"{series}:fit"] for i in idx]
    return rows


# ---------------------------------------------------------------------------
# acceptance criteria


def c1_metric_axioms(seed: int, triples: int = 1000) -> dict:
    rng = np.random.default_rng(seed)

    def rand_set(allow_empty):
        k = int(rng.integers(0 if allow_empty else 1, 7))
        return PointSet(rng.normal(size=(k, 2)) * rng.uniform(0.5, 5), dim=2)

    worst = {"hausdorff": 0.0, "kuratowski": 0.0}
    asym = {"hausdorff": 0, "kuratowski": 0}
    zero_ok = True
    for _ in range(triples):
        A, B, C = rand_set(False), rand_set(False), rand_set(False)
        hab, hba = hausdorff(A, B), hausdorff(B, A)
        asym["hausdorff"] += hab != hba
        worst["hausdorff"] = max(worst["hausdorff"], hab - hausdorff(A, C) - hausdorff(C, B))
        zero_ok &= hausdorff(A, A) == 0.0 and (hab > 0) == (not A.equals(B))
        A, B, C = rand_set(True), rand_set(True), rand_set(True)
        kab, kba = kuratowski_dist(A, B, 2), kuratowski_dist(B, A, 2)
        asym["kuratowski"] += kab != kba
        worst["kuratowski"] = max(worst["kuratowski"],
                                  kab - kuratowski_dist(A, C, 2) - kuratowski_dist(C, B, 2))
    return _result({
        "hausdorff_symmetry": _check(asym["hausdorff"] == 0, asymmetric=asym["hausdorff"]),
        "hausdorff_triangle": _check(worst["hausdorff"] <= 1e-9, worst_excess=worst["hausdorff"]),
        "hausdorff_identity": _check(zero_ok),
        "kuratowski_symmetry": _check(asym["kuratowski"] == 0, asymmetric=asym["kuratowski"]),
        "kuratowski_triangle": _check(worst["kuratowski"] <= 1e-9,
                                      worst_excess=worst["kuratowski"]),
    }, triples=triples)


def c2_round_trips(seed: int, n: int = 10_000) -> dict:
    rng = np.random.default_rng(seed)
    checks = {}
    for dim in (1, 2, 3):
        Y = rng.normal(size=(n, dim)) * 3.0
        e1 = float(np.abs(stereo_project(stereo_lift(Y)) - Y).max())
        Z = rng.normal(size=(4 * n, dim + 1))
        Z /= np.linalg.norm(Z, axis=1, keepdims=True)
        Z = Z[Z[:, -1] < 0.9][:n]
        e2 = float(np.abs(stereo_lift(stereo_project(Z)) - Z).max())
        checks[f"project_lift_R{dim}"] = _check(e1 <= 1e-12, max_error=e1)
        checks[f"lift_project_S{dim}"] = _check(e2 <= 1e-12, max_error=e2)
        south = np.zeros(dim + 1)
        south[-1] = -1.0
        img = stereo_project(south)
        checks[f"south_pole_R{dim}"] = _check(np.all(img == 0.0), image=img)
    return _result(checks, samples=n)


def c3_empty_convention(seed: int) -> dict:
    v = kuratowski_dist(PointSet.empty(1), PointSet([[0.0]]))
    return _result({"empty_vs_origin": _check(v == SPHERE_DIAM + 1.0 == 3.0, value=v)})


def c4_envelope(seed: int, samples: int = 10_000) -> dict:
    D = Domain([[0.0, 1.0]])
    checks, plot = {}, []
    for k in (1, 2, 3):
        f, g = parse("x1"), parse(f"x1^{k}")
        fit = fit_exponent(f, g, D, samples, seed)
        a_err = abs(fit.alpha - 1.0 / k) / (1.0 / k) if fit.feasible else np.inf
        c_err = abs(fit.C - 1.0) if fit.feasible else np.inf
        checks[f"k={k}"] = _check(a_err <= 0.05 and c_err <= 0.05, alpha=fit.alpha, C=fit.C,
                                  alpha_rel_error=a_err, C_rel_error=c_err)
        if k == 2:
            S = D.sample(samples, seed).interior
            plot = _envelope_rows(evaluate_many(f, S), evaluate_many(g, S), fit, "x_vs_x^2")
    return _result(checks), {"envelope": plot}


def ex4_9_alphas(Ms, seed: int, samples: int = 10_000) -> list[dict]:
    out = []
    for M in Ms:
        F = fx.ex4_9(M)
        fit = fit_exponent(F.f, F.g, F.domain, samples, seed)
        out.append({"M": M, "alpha": fit.alpha, "C": fit.C, "feasible": fit.feasible})
    return out


def c5_ex4_9(seed: int, Ms=EX49_M) -> dict:
    rows = ex4_9_alphas(Ms, seed)
    alphas = [r["alpha"] if r["feasible"] else np.nan for r in rows]
    increasing = all(np.isfinite(alphas)) and all(b > a for a, b in zip(alphas, alphas[1:]))
    last = alphas[-1]
    return _result({
        "strictly_increasing": _check(increasing, alphas=alphas, M=list(Ms)),
        "exceeds_6_at_M12": _check(np.isfinite(last) and last > 6 and Ms[-1] == 12, alpha=last),
    }, fits=rows)


def c6_ex3_8(seed: int) -> dict:
    F = fx.ex3_8()
    b = check_g_bounded(F.g, F.domain, seed=seed)
    s = check_star_condition(F.f, F.g, F.domain, seed=seed)
    fit = fit_exponent(F.f, F.g, F.domain, seed=seed)
    return _result({
        "g_bounded_fails": _check(not b.passed and b.value > 1e6, sup_g=b.value),
        "star_condition_passes": _check(s.passed, decile_max_f=s.value),
    }, fit=fit.to_dict())


def c7_ex3_9(seed: int) -> dict:
    F = fx.ex3_9()
    s = check_star_condition(F.f, F.g, F.domain, seed=seed)
    w = float(np.abs(s.witness).max()) if s.witness is not None else np.inf
    checks = {"star_condition_fails_near_0": _check(not s.passed and w <= 1e-2, witness=s.witness,
                                                   witness_g=s.witness_value)}
    for name, h in (("f", F.f), ("g", F.g)):
        est = gamma_zero_set(h, F.domain, seed=seed)
        d = hausdorff_to_interval(est.points.points, 0.0, 1.0)
        bound = est.delta + est.pitch
        has0 = est.points.contains([0.0])
        checks[f"zero_set_{name}"] = _check(d <= bound and has0, hausdorff=d, bound=bound,
                                           contains_0=has0, n_points=len(est.points))
    cloud = value_pair_cloud(F.f, F.g, F.domain, seed=seed)
    sep = separation_fit(cloud)
    checks["separation_infeasible"] = _check(not sep.feasible, reason=sep.reason)
    idx = _subsample(len(cloud))
    plot = [[cloud.s[i], cloud.t[i], "ex3_9"] for i in idx]
    return _result(checks), {"cloud": plot}


def _random_multifunction(rng) -> SampledMultifunction:
    n = int(rng.integers(5, 40))
    X = np.arange(n, dtype=float).reshape(-1, 1)
    vals = []
    for _ in range(n):
        k = int(rng.integers(0, 4))
        vals.append(rng.choice(4, size=k, replace=False).astype(float).reshape(-1, 1))
    if not any(v.size for v in vals):
        vals[0] = np.array([[0.0]])
    return SampledMultifunction(X, vals, 1)


def _lattice_ok(F: SampledMultifunction, a) -> tuple[bool, str]:
    P = {k: preimage(F, a, k) for k in KINDS}
    a_in = all(P[k].contains(a) for k in KINDS)
    strong_ok = P["strong"].subset_of(P["lower"]) and P["strong"].subset_of(P["upper"])
    weak_ok = P["lower"].subset_of(P["weak"]) and P["upper"].subset_of(P["weak"])
    ok = a_in and strong_ok and weak_ok
    return ok, "" if ok else f"a_in={a_in} strong={strong_ok} weak={weak_ok}"


def c8_lattice(seed: int, count: int = 100) -> dict:
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(count):
        F = _random_multifunction(rng)
        dom = np.flatnonzero(F.in_dom)
        for j in rng.choice(dom, size=min(3, dom.size), replace=False):
            ok, why = _lattice_ok(F, F.points[j])
            if not ok:
                bad.append({"case": i, "a": F.points[j], "why": why})
    fixture_cases = [("ex5_14", fx.ex5_14(), (1.0, 4.0)), ("ex5_16", fx.ex5_16(), (0.0, 4.0)),
                     ("ex5_18", fx.ex5_18(), (1.0, 0.5))]
    fixture_bad = []
    for name, M, points in fixture_cases:
        F = M.sampled(1000, seed)
        for a in points:
            ok, why = _lattice_ok(F, [a])
            if not ok:
                fixture_bad.append({"fixture": name, "a": a, "why": why})
    m2 = fx.ex6_4()
    Fm = SampledMultifunction.from_generator(
        np.linspace(-1, 2, 61), lambda x: closest_points(m2.X, x).points)
    for a in (0.25, 0.5):
        ok, why = _lattice_ok(Fm, [a])
        if not ok:
            fixture_bad.append({"fixture": "ex6_4", "a": a, "why": why})
    return _result({
        "random": _check(not bad, failures=bad[:5], multifunctions=count),
        "fixtures": _check(not fixture_bad, failures=fixture_bad),
    })


def c9_ex5(seed: int, samples: int = 1000) -> dict:
    checks = {}
    M14, M16, M18 = fx.ex5_14(), fx.ex5_16(), fx.ex5_18()
    F = M14.sampled(samples, seed)
    pF = M14.pitch(samples)
    d = float(np.min(np.abs(preimage(F, [1.0], "strong").points - 4.0)))
    checks["F_d(4,strong(F(1)))=3"] = _check(abs(d - 3.0) <= pF, value=d, pitch=pF)
    G = M16.sampled(samples, seed)
    pG = M16.pitch(samples)
    d = float(np.min(np.abs(preimage(G, [0.0], "strong").points - 4.0)))
    checks["G_d(4,strong(G(0)))=4"] = _check(abs(d - 4.0) <= pG, value=d, pitch=pG)
    H = M18.sampled(samples, seed)
    pH = M18.pitch(samples)
    for kind in KINDS:
        P = preimage(H, [1.0], kind)
        dist = hausdorff(P, PointSet([[1.0]]))
        checks[f"H_{kind}_preimage={{1}}"] = _check(dist <= pH, hausdorff_to_1=dist,
                                                   points=P.sorted().points.ravel())
    cF = classify_semicontinuity(F, [4.0])
    checks["F_upper_at_4"] = _check(cF["upper"], flags=_flags(cF))
    cG = classify_semicontinuity(G, [4.0])
    checks["G_lower_at_4"] = _check(cG["lower"] and not cG["upper"], flags=_flags(cG))
    X, fv, gv = multifun_pairs(H, [1.0], None, "strong", "hausdorff")
    st = star_check_values(fv, gv, X, c_gap=0.5, eps_star=0.25)
    checks["H_star_condition_fails"] = _check(not st.passed, witness=st.witness,
                                              decile_max_f=st.value, witness_g=st.witness_value)
    return _result(checks)


def _flags(c: dict) -> dict:
    return {k: bool(v) for k, v in c.items() if k != "limits"}


def c10_mf_loja(seed: int, samples: int = 1000) -> dict:
    X = fx.ex6_4().X
    checks = {}
    fit = medial_loja(X, [0.25], Domain([[0.0, 0.45]]), "m", samples=samples, seed=seed)
    checks["thm5_13_upper_two_point_m"] = _check(fit.feasible and fit.C > 0, **_fit_info(fit))
    H = fx.ex5_18(K=(0.0, 1.0)).sampled(samples, seed)
    fit = multifun_loja_fit(H, [1.0], Domain([[0.0, 1.0]]), "strong", "hausdorff")
    checks["thm5_17_strong_continuous_H"] = _check(fit.feasible and fit.C > 0, **_fit_info(fit))
    return _result(checks)


def _fit_info(fit) -> dict:
    return {"alpha": fit.alpha, "C": fit.C, "flags": list(fit.flags)}


def _interval_levels(X, a, scan_kind, D: Domain, base: int, rounds: int, tol=None):
    return [
        (P, m_preimage_mask(X, a, P, scan_kind, tol), pitch)
        for P, pitch in (D.nested_level(base, k) for k in range(rounds))
    ]


def c11_closedness(seed: int, rounds: int = 4) -> dict:
    checks = {}
    X1 = fx.ex6_4().X
    D1 = Domain([[-1.0, 2.0]])
    X2 = fx.twopoint().X
    D2 = Domain([[-2.0, 2.0], [-2.0, 2.0]])
    m_cases = [("X={0,1},a=0.25", X1, [0.25], D1, 31),
               ("X={0,1},a=0.5", X1, [0.5], D1, 31),
               ("twopoint,a=(-0.5,0.3)", X2, [-0.5, 0.3], D2, 21)]
    for kind, label in (("upper", "m_upper"), ("weak", "m_weak")):
        for name, X, a, D, base in m_cases:
            r = rounds if X.shape[1] == 1 else 3
            v = check_closed_levels(_interval_levels(X, a, kind, D, base, r))
            checks[f"{label}[{name}]_closed"] = _check(v.closed, **v.to_dict())
    v = check_closed_levels(_interval_levels(X1, [0.25], "strong", D1, 31, rounds))
    w = v.witness
    near = w is not None and abs(w[0] - 0.5) <= 2 * v.pitches[-1]
    checks["m_strong[X={0,1},a=0.25]_witness_at_0.5"] = _check(near, **v.to_dict())

    circ = fx.circle(400)
    n_cases = [("X={0,1},a=0", X1, [0.0], D1, 31, 1e-9),
               ("twopoint,a=(1,0)", X2, [1.0, 0.0], D2, 21, 1e-9),
               ("circle,a=(1,0)", circ.X, [1.0, 0.0], D2, 21, 1e-9)]
    for name, X, a, D, base, tol in n_cases:
        Xs = ClosedSetSample.of(X, circ.pitch if X is circ.X else 0.0)
        an = np.asarray(a, float)
        r = rounds if X.shape[1] == 1 else 3
        v = check_closed(lambda P: _region_mask(Xs, an, P, tol), D, r, base)
        checks[f"N[{name}]_closed"] = _check(v.closed, **v.to_dict())

    # N_*(N(a)): arguments range over X, so the ambient levels are refinements of X
    R1 = D1.grid(301)
    lv = [(X1, upper_preimage_n_mask(X1, [0.0], R1, 1e-9), 0.0) for _ in range(2)]
    v = check_closed_levels(lv)
    checks["N_upper[X={0,1},a=0]_closed"] = _check(v.closed, **v.to_dict())
    R2 = D2.grid(61)
    lv = []
    for k in range(3):
        c = fx.circle(64 * 2**k)
        lv.append((c.X, upper_preimage_n_mask(ClosedSetSample.of(c.X, c.pitch), [1.0, 0.0], R2,
                                              1e-9), c.pitch))
    v = check_closed_levels(lv)
    checks["N_upper[circle,a=(1,0)]_closed"] = _check(v.closed, **v.to_dict())

    # weak preimage of N: closed in 1-D, not closed on the parabola
    for a in (0.5, 1.0, 2.0):
        lv = []
        for k in range(rounds):
            s = fx.interval_with_point(10 * 2**k)
            lv.append((s.X, weak_preimage_n_mask(ClosedSetSample.of(s.X, s.pitch), [a], 10.0),
                       s.pitch))
        v = check_closed_levels(lv)
        checks[f"N_weak[1d,a={a}]_closed"] = _check(v.closed, **v.to_dict())
    lv = []
    for k in range(rounds):
        s = fx.parabola(16 * 2**k)
        window = 1.0 / (3.0 * s.params["h"])
        lv.append((s.X, weak_preimage_n_mask(ClosedSetSample.of(s.X, s.pitch), [0.0, 0.0], window),
                   s.pitch))
    v = check_closed_levels(lv)
    w = v.witness
    near = w is not None and np.linalg.norm(w - [1.0, 0.0]) <= 2 * v.pitches[-1]
    checks["N_weak[parabola]_witness_at_(1,0)"] = _check(near, **v.to_dict())
    return _result(checks)


def c12_medial(seed: int, samples: int = 10_000) -> dict:
    X = fx.twopoint().X
    D = Domain([[-2.0, 2.0], [-2.0, 2.0]])
    ax = medial_axis(X, D, samples, seed, tol_med=1e-9)
    S = D.sample(samples, seed)
    pitch = S.pitch
    worst = float(np.abs(ax.points[:, 0]).max()) if len(ax) else 0.0
    G = S.grid
    need = G[np.abs(G[:, 0]) <= pitch / 2]
    have = PointSet(ax.points, dim=2)
    missing = [p for p in need if not have.contains(p)]
    plot = [[p[0], p[1], "twopoint"] for p in ax.points]
    return _result({
        "axis_within_pitch": _check(len(ax) > 0 and worst <= pitch, max_abs_x1=worst, pitch=pitch),
        "grid_column_reported": _check(not missing, required=len(need), missing=len(missing)),
    }), {"axis": plot}


def c13_determinism(seed: int) -> dict:
    a = [clean(run_fixture(t, seed)) for t in ("ex3_9", "ex6_4", "twopoint")]
    b = [clean(run_fixture(t, seed)) for t in ("ex3_9", "ex6_4", "twopoint")]
    same = json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    return _result({"fixture_reports_identical": _check(same)})


CRITERIA = {
    "c1": ("metric axioms", c1_metric_axioms),
    "c2": ("stereographic round trips", c2_round_trips),
    "c3": ("empty-set convention", c3_empty_convention),
    "c4": ("envelope fit correctness", c4_envelope),
    "c5": ("unbounded exponent growth", c5_ex4_9),
    "c6": ("unbounded g detection", c6_ex3_8),
    "c7": ("sequence condition failure", c7_ex3_9),
    "c8": ("preimage lattice", c8_lattice),
    "c9": ("one-dimensional multifunction examples", c9_ex5),
    "c10": ("multifunction Lojasiewicz instances", c10_mf_loja),
    "c11": ("closedness matrix", c11_closedness),
    "c12": ("medial axis", c12_medial),
    "c13": ("determinism", c13_determinism),
}


# ---------------------------------------------------------------------------
# per-fixture reports


def run_fixture(tag: str, seed: int = 42, params: dict | None = None) -> dict:
    params = dict(params or {})
    if tag == "ex3_8":
        F = fx.ex3_8()
        b = check_g_bounded(F.g, F.domain, seed=seed)
        s = check_star_condition(F.f, F.g, F.domain, seed=seed)
        fit = fit_exponent(F.f, F.g, F.domain, seed=seed)
        return {"g_bounded": b.verdict, "sup_g": b.value, "star_condition": s.verdict,
                "fit": fit.to_dict(), "passed": (not b.passed) and s.passed}
    if tag == "ex3_9":
        F = fx.ex3_9()
        s = check_star_condition(F.f, F.g, F.domain, seed=seed)
        zs = {n: gamma_zero_set(h, F.domain, seed=seed) for n, h in (("f", F.f), ("g", F.g))}
        return {"star_condition": s.verdict, "witness": s.witness,
                "zero_sets": {n: {"representatives": z.representatives.points,
                                  "hausdorff_to_[0,1]": hausdorff_to_interval(z.points.points, 0, 1),
                                  "pitch": z.pitch, "delta": z.delta} for n, z in zs.items()},
                "passed": not s.passed}
    if tag == "ex4_9":
        Ms = [float(params["M"])] if "M" in params else list(EX49_M)
        rows = ex4_9_alphas(Ms, seed)
        return {"fits": rows, "passed": all(r["feasible"] for r in rows)}
    if tag in ("ex5_14", "ex5_16", "ex5_18"):
        M = fx.get(tag)
        F = M.sampled(1000, seed)
        a = {"ex5_14": 1.0, "ex5_16": 0.0, "ex5_18": 1.0}[tag]
        at = {"ex5_14": 4.0, "ex5_16": 4.0, "ex5_18": 1.0}[tag]
        pre = {k: preimage(F, [a], k).sorted().points.ravel() for k in KINDS}
        c = classify_semicontinuity(F, [at])
        return {"a": a, "preimages": pre, "classified_at": at, "flags": _flags(c),
                "limsup": c["limits"].limsup.points.ravel(),
                "liminf": c["limits"].liminf.points.ravel(), "passed": True}
    if tag == "ex6_4":
        X = fx.ex6_4().X
        D = Domain([[-1.0, 2.0]])
        out = {}
        for kind in KINDS:
            v = check_closed_levels(_interval_levels(X, [0.25], kind, D, 31, 4))
            out[kind] = v.to_dict()
        return {"closedness_at_a=0.25": out, "m(0.5)": closest_points(X, [0.5]).points.ravel(),
                "passed": out["strong"]["witness"] is not None}
    if tag == "ex6_6":
        rounds = int(params.get("rounds", 4))
        lv = []
        for k in range(rounds):
            s = fx.parabola(16 * 2**k)
            window = 1.0 / (3.0 * s.params["h"])
            lv.append((s.X, weak_preimage_n_mask(ClosedSetSample.of(s.X, s.pitch), [0.0, 0.0],
                                                 window), s.pitch))
        v = check_closed_levels(lv)
        return {"weak_preimage_N": v.to_dict(), "passed": v.witness is not None}
    if tag == "prop6_circle":
        c = fx.circle(int(params.get("n", 400)))
        Xs = ClosedSetSample.of(c.X, c.pitch)
        D = Domain([[-2.0, 2.0], [-2.0, 2.0]])
        region = n_region(Xs, [1.0, 0.0], D, 4000, seed, tol_med=1e-9)
        ax = medial_axis(Xs, Domain([[-0.9, 0.9], [-0.9, 0.9]]), 4000, seed, tol_med=1e-6)
        return {"n_region_size": len(region),
                "n_region_max_abs_y": float(np.abs(region.points[:, 1]).max()) if len(region) else None,
                "axis_points": ax.points, "passed": len(ax) > 0}
    if tag == "twopoint":
        X = fx.twopoint().X
        ax = medial_axis(X, Domain([[-2.0, 2.0], [-2.0, 2.0]]), 2000, seed, tol_med=1e-9)
        return {"axis_size": len(ax), "max_abs_x1": float(np.abs(ax.points[:, 0]).max()),
                "passed": len(ax) > 0}
    raise LojaError(f"unknown fixture tag {tag!r}; known: {', '.join(fx.TAGS)}")


# ---------------------------------------------------------------------------


def run_paper_suite(seed: int = 42, only: str | None = None, params: dict | None = None,
                    command: list[str] | None = None) -> dict:
    """Run the acceptance matrix (or one criterion / fixture) and build the report."""
    report = {"schema": SCHEMA, "command": list(command or []), "seed": seed,
              "results": {}, "plot_data": {}, "timings": {}}
    if only is None:
        selected = list(CRITERIA)
    elif only in CRITERIA:
        selected = [only]
    elif only in fx.TAGS:
        t0 = time.perf_counter()
        try:
            res = run_fixture(only, seed, params)
        except Exception as exc:  # aggregated, never aborts
            res = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
        report["results"][only] = res
        report["timings"][only] = time.perf_counter() - t0
        report["passed"] = bool(res.get("passed", False))
        return clean(report)
    else:
        raise LojaError(f"unknown selector {only!r}")
    for cid in selected:
        title, fn = CRITERIA[cid]
        t0 = time.perf_counter()
        try:
            out = fn(seed)
            if isinstance(out, tuple):
                out, plots = out
                for key, rows in plots.items():
                    report["plot_data"].setdefault(key, []).extend(rows)
        except Exception as exc:
            out = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
        out["title"] = title
        report["results"][cid] = out
        report["timings"][cid] = time.perf_counter() - t0
    report["passed"] = all(r["passed"] for r in report["results"].values())
    return clean(report)


def strip_timings(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timings"}


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


PLOT_SELECTORS = ("envelope", "axis", "cloud")


def emit_plot_data(report: dict, what: str) -> str:
    """Tidy ``x,y,series`` CSV for one plot selector."""
    if what not in PLOT_SELECTORS:
        raise LojaError(f"unknown selector {what!r}; expected one of {PLOT_SELECTORS}")
    rows = report.get("plot_data", {}).get(what)
    if rows is None:
        raise LojaError(f"report has no {what!r} data (was the producing criterion run?)")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "series"])
    for x, y, s in rows:
        w.writerow([repr(float(x)), repr(float(y)), s])
    return buf.getvalue()
