"""Command-line front end.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage or
I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fixtures as fx
from .config import SPHERE_DIAM
from .domain import Domain
from .errors import LojaError
from .expr import evaluate_many, lint, load, parse, to_source
from .geometry import PointSet, hausdorff_ext, kuratowski_dist
from .lojafit import check_g_bounded, check_star_condition, fit_exponent, reverse_fit
from .medial import ClosedSetSample, medial_axis, medial_loja, n_region
from .multifun import (
    KINDS,
    METRICS,
    SampledMultifunction,
    classify_semicontinuity,
    multifun_loja_fit,
    preimage,
)
from .suite import PLOT_SELECTORS, clean, dumps, emit_plot_data, run_paper_suite
from .zeroset import DEFAULT_DELTA, DEFAULT_EPS, gamma_zero_set

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _point(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise LojaError(f"bad point {text!r}: expected comma-separated numbers") from exc


def _write(args, payload, csv_rows=None, header=None) -> None:
    """Emit ``payload`` as JSON, or ``csv_rows`` when ``--format csv`` is requested."""
    if getattr(args, "format", "json") == "csv" and csv_rows is not None:
        lines = [",".join(header)] if header else []
        lines += [",".join(repr(float(v)) for v in row) for row in csv_rows]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(clean(payload), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _domain(args, attr: str = "domain") -> Domain:
    text = getattr(args, attr)
    if text is None:
        raise LojaError(f"--{attr} is required")
    return Domain.parse(text, getattr(args, "where", None))


def _multifunction(args) -> SampledMultifunction:
    if args.mf:
        return SampledMultifunction.from_jsonl(args.mf)
    if args.branches:
        branches = [load(p) for p in args.branches.split(",")]
        D = _domain(args)
        return SampledMultifunction.from_branches(branches, D.sample(args.samples, args.seed).interior)
    raise LojaError("give --mf FILE or --branches f1.fn,f2.fn")


# ---------------------------------------------------------------------------
# subcommands


def cmd_parse(args) -> int:
    fn = load(args.fn) if args.fn else parse(args.expr)
    payload = {"arity": fn.arity, "source": to_source(fn)}
    if args.domain:
        payload["lint"] = lint(fn, _domain(args).sample(args.samples, args.seed).points)
    _write(args, payload)
    return EXIT_OK


def cmd_eval(args) -> int:
    fn = load(args.fn) if args.fn else parse(args.expr)
    if args.points:
        X = PointSet.from_csv(args.points).points
    else:
        X = np.atleast_2d(_point(args.at))
    vals = evaluate_many(fn, X)
    _write(args, {"points": X, "values": vals}, np.column_stack([X, vals]),
           [f"x{i + 1}" for i in range(X.shape[1])] + ["value"])
    return EXIT_OK


def cmd_zeroset(args) -> int:
    est = gamma_zero_set(load(args.fn), _domain(args), args.eps, args.delta, args.samples, args.seed)
    _write(args, est.to_dict(), est.points.points,
           [f"x{i + 1}" for i in range(est.points.dim)])
    return EXIT_OK


def cmd_fit(args) -> int:
    f, g, D = load(args.f), load(args.g), _domain(args)
    fit = (reverse_fit if args.reverse else fit_exponent)(f, g, D, args.samples, args.seed)
    rep = fit.to_dict()
    ok = fit.feasible
    rep["star_condition"] = "skipped"
    rep["g_bounded"] = "skipped"
    rep["sup_g"] = None
    if args.check_star:
        s = check_star_condition(f, g, D, args.samples, args.seed, args.c_gap, args.eps_star)
        rep["star_condition"] = s.verdict
        rep["star_witness"] = s.witness
        ok &= s.passed
    if args.check_bounded:
        b = check_g_bounded(g, D, args.samples, args.seed, args.bound_probe)
        rep["g_bounded"] = b.verdict
        rep["sup_g"] = b.value
        ok &= b.passed
    _write(args, rep)
    return EXIT_OK if ok else EXIT_FAIL


def _limits_payload(lim) -> dict:
    return {"liminf": lim.liminf.points, "limsup": lim.limsup.points,
            "radius_used": lim.radius_used, "shell_size": lim.shell_size,
            "converged": lim.converged}


def cmd_classify(args) -> int:
    F = _multifunction(args)
    c = classify_semicontinuity(F, _point(args.at), tol_cluster=args.tol_cluster)
    payload = {k: v for k, v in c.items() if k != "limits"}
    payload["limits"] = _limits_payload(c["limits"])
    _write(args, payload)
    return EXIT_OK


def cmd_preimage(args) -> int:
    F = _multifunction(args)
    P = preimage(F, _point(args.at), args.kind).sorted()
    _write(args, {"kind": args.kind, "points": P.points}, P.points,
           [f"x{i + 1}" for i in range(P.dim)])
    return EXIT_OK


def cmd_mfloja(args) -> int:
    F = _multifunction(args)
    K = Domain.parse(args.K) if args.K else None
    fit = multifun_loja_fit(F, _point(args.at), K, args.kind, args.metric)
    _write(args, fit.to_dict())
    return EXIT_OK if fit.feasible else EXIT_FAIL


def _pair(args):
    A = PointSet.from_csv(args.a)
    B = PointSet.from_csv(args.b, dim=A.dim if len(A) else None)
    return A, B


def cmd_hausdorff(args) -> int:
    A, B = _pair(args)
    _write(args, {"hausdorff": hausdorff_ext(A, B, args.ambient_diam)})
    return EXIT_OK


def cmd_kuratowski(args) -> int:
    A, B = _pair(args)
    _write(args, {"kuratowski": kuratowski_dist(A, B, A.dim)})
    return EXIT_OK


def _closed_sample(args) -> ClosedSetSample:
    X = PointSet.from_csv(args.X)
    return ClosedSetSample.of(X, args.pitch)


def cmd_medial(args) -> int:
    ax = medial_axis(_closed_sample(args), _domain(args), args.samples, args.seed, args.tol)
    if args.format == "json":
        _write(args, {"points": ax.points, "multiplicity": ax.multiplicity, "gap": ax.gap,
                      "tol_med": ax.tol_med, "pitch": ax.pitch})
    else:
        n = ax.points.shape[1] if ax.points.ndim == 2 else 0
        _write(args, None, ax.rows(), [f"x{i + 1}" for i in range(n)] + ["multiplicity", "gap"])
    return EXIT_OK


def cmd_nregion(args) -> int:
    R = n_region(_closed_sample(args), _point(args.at), _domain(args), args.samples, args.seed,
                 args.tol)
    _write(args, {"points": R.points}, R.points, [f"x{i + 1}" for i in range(R.dim)])
    return EXIT_OK


def cmd_medloja(args) -> int:
    Xs = _closed_sample(args)
    K = _domain(args)
    fit = medial_loja(Xs, _point(args.at), K, args.kind, args.metric, args.samples, args.seed,
                      args.tol)
    _write(args, fit.to_dict())
    return EXIT_OK if fit.feasible else EXIT_FAIL


def _params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise LojaError(f"bad --param {item!r}: expected KEY=VALUE")
        out[key.strip()] = float(value)
    return out


def cmd_paper_suite(args, argv) -> int:
    report = run_paper_suite(args.seed, args.only, _params(args.param), ["paper-suite", *argv])
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.plot:
        csv_text = emit_plot_data(report, args.plot)
        if args.plot_out:
            Path(args.plot_out).write_text(csv_text)
        else:
            sys.stdout.write(csv_text)
    for name, res in report["results"].items():
        mark = "PASS" if res.get("passed") else "FAIL"
        print(f"{mark} {name} {res.get('title', '')}".rstrip(), file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--samples", type=int, default=10_000)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="loja", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, func):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    def fn_source(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--fn", help="function source file")
        g.add_argument("--expr", help="function source text")

    def domain(sp, required=False):
        sp.add_argument("--domain", required=required, help='box "a1,b1;a2,b2"')
        sp.add_argument("--where", help="guard restricting the box, e.g. 'x1 > -1'")

    def mf(sp):
        sp.add_argument("--mf", help="multifunction JSON-lines file")
        sp.add_argument("--branches", help="comma-separated branch files (F(x) = defined values)")
        domain(sp)
        sp.add_argument("--at", required=True, help='point "a1,a2"')

    sp = add("parse", "parse and pretty-print a function", cmd_parse)
    fn_source(sp)
    domain(sp)

    sp = add("eval", "evaluate a function", cmd_eval)
    fn_source(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--at")
    g.add_argument("--points", help="CSV of points")

    sp = add("zeroset", "estimate the generalized zero set", cmd_zeroset)
    sp.add_argument("--fn", required=True)
    domain(sp, True)
    sp.add_argument("--eps", type=float, default=DEFAULT_EPS)
    sp.add_argument("--delta", type=float, default=DEFAULT_DELTA)

    sp = add("fit", "fit |f| >= C|g|^alpha", cmd_fit)
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    domain(sp, True)
    sp.add_argument("--reverse", action="store_true", help="fit |f|^N <= C|g| instead")
    sp.add_argument("--check-star", action="store_true")
    sp.add_argument("--check-bounded", action="store_true")
    sp.add_argument("--c-gap", type=float, default=0.1)
    sp.add_argument("--eps-star", type=float, default=1e-3)
    sp.add_argument("--bound-probe", type=float, default=1e6)

    sp = add("classify", "semicontinuity flags of a multifunction", cmd_classify)
    mf(sp)
    sp.add_argument("--tol-cluster", type=float, default=1e-2)

    sp = add("preimage", "preimage of F(a)", cmd_preimage)
    mf(sp)
    sp.add_argument("--kind", choices=KINDS, required=True)

    sp = add("mfloja", "multifunction Lojasiewicz fit", cmd_mfloja)
    mf(sp)
    sp.add_argument("--kind", choices=KINDS, default="upper")
    sp.add_argument("--metric", choices=METRICS, default="hausdorff")
    sp.add_argument("--K", help='compact set K as a box "a1,b1;..." (default: all samples)')

    for name, func in (("hausdorff", cmd_hausdorff), ("kuratowski", cmd_kuratowski)):
        sp = add(name, f"{name} distance of two CSV point sets", func)
        sp.add_argument("--a", required=True)
        sp.add_argument("--b", required=True)
        if name == "hausdorff":
            sp.add_argument("--ambient-diam", type=float, default=SPHERE_DIAM)

    def xset(sp):
        sp.add_argument("--X", required=True, help="CSV sample of the closed set")
        sp.add_argument("--pitch", type=float, help="sampling pitch of X (default: estimated)")
        sp.add_argument("--tol", type=float, help="tol_med (default: 2 x pitch)")

    sp = add("medial", "medial axis of a point sample", cmd_medial)
    xset(sp)
    domain(sp, True)

    sp = add("nregion", "N(a) region of a point of X", cmd_nregion)
    xset(sp)
    domain(sp, True)
    sp.add_argument("--at", required=True)

    sp = add("medloja", "Lojasiewicz fit for m or N", cmd_medloja)
    xset(sp)
    domain(sp, True)
    sp.add_argument("--at", required=True)
    sp.add_argument("--kind", choices=("m", "N"), default="m")
    sp.add_argument("--metric", choices=METRICS)

    sp = sub.add_parser("paper-suite", help="run the regression matrix")
    sp.set_defaults(func=None)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--only", help="criterion id (c1..c13) or fixture tag (" + ", ".join(fx.TAGS) + ")")
    sp.add_argument("--param", action="append", help="fixture parameter KEY=VALUE")
    sp.add_argument("--out")
    sp.add_argument("--plot", choices=PLOT_SELECTORS, help="also emit plot data as CSV")
    sp.add_argument("--plot-out")
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        if args.command == "paper-suite":
            return cmd_paper_suite(args, argv[1:])
        return args.func(args)
    except (LojaError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"loja: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
