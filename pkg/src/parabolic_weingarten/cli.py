"""Command-line interface: trace, classify, verify, mesh, sweep and figures."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from pathlib import Path

from .analysis import extract_features, reconcile
from .classify import classify_coefficients
from .hyperbolic import InvalidRelationError, RelationKind
from .ode import EventKind, InitialData, IntegrationError, StepOptions, integrate, trace_residual_max

EXIT_OK, EXIT_USAGE, EXIT_INTEGRATION, EXIT_VERIFY = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _clean(obj):
    """JSON-safe copy: non-finite floats become null, enums their values."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "value") and hasattr(obj, "name"):
        return obj.value
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n")


def _add_relation(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("relation")
    kind = g.add_mutually_exclusive_group(required=True)
    kind.add_argument("--principal", action="store_true", help="kappa1 = m kappa2 + n")
    kind.add_argument("--meangauss", action="store_true", help="a H + b K = c")
    g.add_argument("-m", type=float, help="slope m of the principal relation")
    g.add_argument("-n", type=float, help="offset n of the principal relation")
    g.add_argument("-a", type=float, help="mean curvature coefficient a")
    g.add_argument("-b", type=float, help="Gauss curvature coefficient b")
    g.add_argument("-c", type=float, help="right-hand side c")


def _add_init(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("initial data")
    g.add_argument("--z0", type=float, default=1.0, help="initial height (default 1)")
    g.add_argument("--theta0", type=float, default=0.0, help="initial tangent angle in radians (default 0)")


def _add_steps(p: argparse.ArgumentParser) -> None:
    d = StepOptions()
    g = p.add_argument_group("integration")
    g.add_argument("--rel-tol", type=float, default=d.rel_tol, help=f"relative tolerance (default {d.rel_tol:g})")
    g.add_argument("--abs-tol", type=float, default=d.abs_tol, help=f"absolute tolerance (default {d.abs_tol:g})")
    g.add_argument("--max-arclength", type=float, default=d.max_arclength,
                   help=f"arclength window per branch, in units of z0 (default {d.max_arclength:g})")


def _raw(args) -> tuple[RelationKind, tuple[float, float, float]]:
    if args.principal:
        if args.m is None or args.n is None:
            raise UsageError("--principal needs -m and -n")
        if any(v is not None for v in (args.a, args.b, args.c)):
            raise UsageError("-a/-b/-c belong to --meangauss")
        return RelationKind.PRINCIPAL_LINEAR, (1.0, -args.m, args.n)
    if args.a is None or args.b is None or args.c is None:
        raise UsageError("--meangauss needs -a, -b and -c")
    if args.m is not None or args.n is not None:
        raise UsageError("-m/-n belong to --principal")
    return RelationKind.MEAN_GAUSS, (args.a, args.b, args.c)


def _setup(args):
    kind, raw = _raw(args)
    init = InitialData(args.z0, args.theta0)
    opts = StepOptions(rel_tol=args.rel_tol, abs_tol=args.abs_tol, max_arclength=args.max_arclength) \
        if hasattr(args, "rel_tol") else None
    try:
        rel, verdict = classify_coefficients(kind, *raw, init.theta0)
    except InvalidRelationError as exc:
        raise UsageError(str(exc)) from exc
    return rel, verdict, init, opts


def _trace_summary(trace) -> dict:
    terminal = {}
    for d, name in ((-1, "backward"), (1, "forward")):
        ev = trace.terminal[d]
        entry = ev.to_dict()
        if ev.kind in (EventKind.BOUNDARY_CONTACT, EventKind.SLOPE_BLOWUP):
            entry["measuredAngle"] = abs(math.remainder(ev.theta, 2 * math.pi))
            entry["measuredCos"] = math.cos(ev.theta)
        terminal[name] = entry
    counts: dict[str, int] = {}
    for e in trace.events:
        counts[e.kind.value] = counts.get(e.kind.value, 0) + 1
    return {"relation": trace.relation.to_dict(), "z0": trace.init.z0, "theta0": trace.init.theta0,
            "options": trace.options.to_dict(), "states": len(trace), "degenerate": trace.degenerate,
            "sRange": [float(trace.s[0]), float(trace.s[-1])], "terminal": terminal,
            "eventCounts": counts, "residualMax": trace_residual_max(trace)}


def _integrate(rel, init, opts):
    trace = integrate(rel, init, opts)
    failed = any(ev.kind is EventKind.STEP_FAILURE for ev in trace.terminal.values())
    return trace, failed


def cmd_trace(args) -> int:
    from .mesh import write_profile_csv
    from .svg import write_svg
    rel, verdict, init, opts = _setup(args)
    if rel is None:
        _emit({"verdict": verdict.to_dict(), "note": "constant principal curvature: no profile equation"})
        return EXIT_OK
    trace, failed = _integrate(rel, init, opts)
    if args.csv:
        write_profile_csv(trace, args.csv)
    if args.svg:
        write_svg([trace], args.svg, title=json.dumps(rel.to_dict(), sort_keys=True),
                  clip_length=args.svg_window)
    out = _trace_summary(trace)
    out["shapeClass"] = verdict.shape_class.value
    _emit(out)
    return EXIT_INTEGRATION if failed else EXIT_OK


def cmd_classify(args) -> int:
    kind, raw = _raw(args)
    try:
        rel, verdict = classify_coefficients(kind, *raw, args.theta0)
    except InvalidRelationError as exc:
        raise UsageError(str(exc)) from exc
    _emit({"relation": rel.to_dict() if rel else None, "theta0": args.theta0, "verdict": verdict.to_dict()})
    return EXIT_OK


def cmd_verify(args) -> int:
    rel, verdict, init, opts = _setup(args)
    if rel is None:
        _emit({"verdict": verdict.to_dict(), "passed": True, "vacuous": True})
        return EXIT_OK
    trace, failed = _integrate(rel, init, opts)
    report = reconcile(extract_features(trace), verdict)
    out = {"verdict": verdict.to_dict(), "passed": report.passed, "vacuous": report.vacuous,
           "reconciliation": report.to_dict(), "trace": _trace_summary(trace)}
    _emit(out)
    if failed:
        return EXIT_INTEGRATION
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_mesh(args) -> int:
    from .mesh import build_mesh, discrete_curvature_audit, write_obj
    rel, verdict, init, opts = _setup(args)
    if rel is None:
        raise UsageError("constant principal curvature: no profile to sweep")
    trace, failed = _integrate(rel, init, opts)
    if failed:
        _emit(_trace_summary(trace))
        return EXIT_INTEGRATION
    s_range = None if args.s_window is None else (-args.s_window * init.z0, args.s_window * init.z0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        mesh = build_mesh(trace, (args.t_min, args.t_max), args.t_count, s_stride=args.stride,
                          spacing=args.spacing, s_range=s_range)
    write_obj(mesh, args.obj)
    _emit({"obj": str(args.obj), "rows": mesh.shape[0], "columns": mesh.shape[1],
           "audit": discrete_curvature_audit(mesh), "warnings": [str(w.message) for w in caught]})
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .sweep import SweepError, SweepSpec, run_sweep
    path = Path(args.spec)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read sweep spec {path}: {exc}") from exc
    try:
        spec = SweepSpec.from_mapping(data, base_dir=path.parent)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid sweep spec: {exc}") from exc
    if args.out is not None:
        spec = SweepSpec(spec.kind, spec.axes, spec.fixed, spec.init, spec.options, Path(args.out),
                         spec.write_traces, spec.workers)
    if spec.output_dir is None:
        spec = SweepSpec(spec.kind, spec.axes, spec.fixed, spec.init, spec.options, path.parent,
                         spec.write_traces, spec.workers)
    try:
        diagram = run_sweep(spec)
    except SweepError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    _emit(diagram.manifest())
    return EXIT_OK


FIGURE_WINDOW = 12.0  # arclength shown for unbounded profiles, times z0


def cmd_figures(args) -> int:
    from .presets import PRESETS
    from .svg import write_svg
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    index = []
    failed = False
    for p in PRESETS:
        trace, bad = _integrate(p.relation, p.init, None)
        failed |= bad
        name = f"{p.key}.svg"
        write_svg([trace], out / name, title=p.description, clip_length=FIGURE_WINDOW)
        index.append({"file": name, "key": p.key, "description": p.description,
                      "relation": p.relation.to_dict(), "theta0": p.theta0})
    (out / "index.json").write_text(json.dumps(_clean(index), indent=2, sort_keys=True) + "\n")
    _emit({"out": str(out), "files": [e["file"] for e in index],
           "seconds": time.perf_counter() - t0})
    return EXIT_INTEGRATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parabolic-weingarten",
        description="Profile curves of parabolic linear Weingarten surfaces in hyperbolic 3-space "
                    "(upper half-space model).",
        epilog="Exit codes: 0 ok, 2 usage error, 3 integration failure, 4 verification failure. "
               "WEINGARTEN_THREADS caps sweep parallelism.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("trace", help="integrate a profile; print terminal events and limit angles as JSON")
    _add_relation(p), _add_init(p), _add_steps(p)
    p.add_argument("--csv", type=Path, help="write the profile (s,x,z,theta,kappa1,kappa2,H,K) to this CSV")
    p.add_argument("--svg", type=Path, help="write an SVG of the (x, z) curve")
    p.add_argument("--svg-window", type=float, default=None,
                   help="only draw states with |s| below this arclength")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("classify", help="print the predicted shape class without integrating")
    _add_relation(p)
    p.add_argument("--theta0", type=float, default=0.0, help="initial tangent angle in radians (default 0)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="trace, classify and reconcile; exit 4 when they disagree")
    _add_relation(p), _add_init(p), _add_steps(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mesh", help="sweep a profile along the orbit direction and write an OBJ mesh")
    _add_relation(p), _add_init(p), _add_steps(p)
    p.add_argument("--obj", type=Path, required=True, help="output OBJ path")
    p.add_argument("--t-min", type=float, default=-1.0, help="orbit parameter start (default -1)")
    p.add_argument("--t-max", type=float, default=1.0, help="orbit parameter end (default 1)")
    p.add_argument("--t-count", type=int, default=2, help="orbit samples, at least 2 (default 2)")
    p.add_argument("--stride", type=int, default=None, help="use every k-th stored state instead of resampling")
    p.add_argument("--spacing", type=float, default=1e-3, help="resampling step in units of z0 (default 1e-3)")
    p.add_argument("--s-window", type=float, default=None, help="keep rows with |s| below this, times z0")
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("sweep", help="run a parameter sweep from a JSON spec file")
    p.add_argument("spec", help="sweep specification (JSON)")
    p.add_argument("--out", type=Path, default=None,
                   help="output directory (default: spec's outputDir, else the spec's folder)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figures", help="regenerate the gallery of published examples as SVG files")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except IntegrationError as exc:
        sys.stderr.write(f"integration failure: {exc}\n")
        return EXIT_INTEGRATION
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
