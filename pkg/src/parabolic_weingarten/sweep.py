"""Parameter sweeps, phase diagrams and the embeddedness-threshold bisection."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .analysis import extract_features, feature_signature, reconcile
from .classify import classify_coefficients
from .hyperbolic import RelationKind, WeingartenRelation
from .mesh import profile_csv_text
from .ode import EventKind, InitialData, StepOptions, Trace, integrate, trace_residual_max

THREADS_ENV = "WEINGARTEN_THREADS"
PROBE_EPS = 1e-6

# Long windows with a period cap: loop size grows with height, so a short
# arclength window misses the closure of large periodic loops.
SWEEP_OPTIONS = StepOptions(max_arclength=1e6, max_periods=2)

AXIS_NAMES = {RelationKind.PRINCIPAL_LINEAR: ("m", "n"), RelationKind.MEAN_GAUSS: ("a", "b", "c")}

DIAGRAM_COLUMNS = (
    "i", "j", "m", "n", "a", "b", "c", "status", "shapeClass", "signature", "reconciled",
    "terminalBackward", "terminalForward", "limitAngleBackward", "limitAngleForward",
    "predictedAngle", "selfIntersects", "period", "residualMax", "boundaryProbe", "error",
)


class SweepError(RuntimeError):
    pass


class NoSignChangeError(ValueError):
    """The bisection predicate agrees at both ends of the bracket."""


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"axis {self.name}: range must be finite")
        if int(self.count) < 1:
            raise ValueError(f"axis {self.name}: count must be positive")
        if self.count > 1 and not self.hi > self.lo:
            raise ValueError(f"axis {self.name}: need hi > lo")

    @property
    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.lo)])
        return np.linspace(self.lo, self.hi, int(self.count))

    def to_dict(self) -> dict:
        return {"name": self.name, "lo": self.lo, "hi": self.hi, "count": int(self.count)}


@dataclass(frozen=True)
class SweepSpec:
    """A one- or two-axis grid over the coefficients of one relation kind.

    Coefficients not on an axis are taken from ``fixed``.  For mean/Gauss
    relations the raw ``(a, b, c)`` are normalized per cell.
    """

    kind: RelationKind
    axes: tuple[Axis, ...]
    fixed: dict = field(default_factory=dict)
    init: InitialData = field(default_factory=InitialData)
    options: StepOptions = SWEEP_OPTIONS
    output_dir: Path | None = None
    write_traces: bool = False
    workers: int | None = None

    def __post_init__(self):
        kind = RelationKind(self.kind)
        object.__setattr__(self, "kind", kind)
        names = AXIS_NAMES[kind]
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep has one or two axes")
        axis_names = [a.name for a in self.axes]
        if len(set(axis_names)) != len(axis_names):
            raise ValueError("axes must be distinct")
        for n in axis_names + list(self.fixed):
            if n not in names:
                raise ValueError(f"{n!r} is not a coefficient of {kind.value}")
        missing = set(names) - set(axis_names) - set(self.fixed)
        if missing:
            raise ValueError(f"coefficients {sorted(missing)} need an axis or a fixed value")
        if set(axis_names) & set(self.fixed):
            raise ValueError("a coefficient cannot be both an axis and fixed")
        for v in self.fixed.values():
            if not math.isfinite(float(v)):
                raise ValueError("fixed coefficients must be finite")
        if self.workers is not None and int(self.workers) < 1:
            raise ValueError("workers must be positive")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(int(a.count) for a in self.axes)

    def points(self) -> list[tuple[tuple[int, int], dict]]:
        """Grid cells in row-major order as ``((i, j), coefficients)``."""
        vals = [a.values for a in self.axes]
        out = []
        second = vals[1] if len(vals) > 1 else [None]
        for i, u in enumerate(vals[0]):
            for j, v in enumerate(second):
                co = {k: float(x) for k, x in self.fixed.items()}
                co[self.axes[0].name] = float(u)
                if v is not None:
                    co[self.axes[1].name] = float(v)
                out.append(((i, j), co))
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "axes": [a.to_dict() for a in self.axes],
                "fixed": dict(sorted(self.fixed.items())),
                "z0": self.init.z0, "theta0": self.init.theta0,
                "options": self.options.to_dict(), "writeTraces": self.write_traces}

    @classmethod
    def from_mapping(cls, data: dict[str, Any], base_dir: Path | None = None) -> "SweepSpec":
        known = {"kind", "axes", "fixed", "z0", "theta0", "options", "outputDir", "writeTraces", "workers"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown sweep keys {sorted(extra)}")
        axes = data.get("axes")
        if not isinstance(axes, list):
            raise ValueError("'axes' must be a list")
        parsed = []
        for a in axes:
            if isinstance(a, dict):
                parsed.append(Axis(str(a["name"]), float(a["lo"]), float(a["hi"]), int(a["count"])))
            else:
                name, lo, hi, count = a
                parsed.append(Axis(str(name), float(lo), float(hi), int(count)))
        out = data.get("outputDir")
        if out is not None and base_dir is not None and not Path(out).is_absolute():
            out = Path(base_dir) / out
        opts = data.get("options")
        return cls(
            kind=RelationKind(data.get("kind", RelationKind.PRINCIPAL_LINEAR.value)),
            axes=tuple(parsed), fixed={k: float(v) for k, v in (data.get("fixed") or {}).items()},
            init=InitialData(float(data.get("z0", 1.0)), float(data.get("theta0", 0.0))),
            options=SWEEP_OPTIONS if opts is None else StepOptions.from_mapping(
                {**SWEEP_OPTIONS.to_dict(), **opts}),
            output_dir=None if out is None else Path(out),
            write_traces=bool(data.get("writeTraces", False)),
            workers=None if data.get("workers") is None else int(data["workers"]))

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _raw(kind: RelationKind, co: dict) -> tuple[float, float, float]:
    if kind is RelationKind.PRINCIPAL_LINEAR:
        # kappa1 - m kappa2 = n
        return 1.0, -co["m"], co["n"]
    return co["a"], co["b"], co["c"]


def _shape_name(kind, co, theta0) -> str:
    try:
        return classify_coefficients(kind, *_raw(kind, co), theta0)[1].shape_class.value
    except ValueError as exc:
        return f"invalid: {exc}"


def boundary_probe(kind: RelationKind, co: dict, axes: Sequence[str], theta0: float,
                   eps: float = PROBE_EPS) -> dict | None:
    """Classes just off the cell along each axis, when any differs from the cell's own.

    A cell on a case boundary is classified by the equality branch; the probe
    records what the strict inequalities on either side give.
    """
    own = _shape_name(kind, co, theta0)
    probes = {}
    for name in axes:
        step = eps * max(1.0, abs(co[name]))
        for sign, tag in ((-1.0, "-"), (1.0, "+")):
            probes[name + tag] = _shape_name(kind, {**co, name: co[name] + sign * step}, theta0)
    if all(v == own for v in probes.values()):
        return None
    return probes


def evaluate_cell(kind: RelationKind, co: dict, init: InitialData, options: StepOptions,
                  axes: Sequence[str] = (), keep_trace: bool = False) -> dict:
    """Trace, classify and reconcile one parameter point; errors are captured."""
    cell: dict[str, Any] = {k: co.get(k) for k in ("m", "n", "a", "b", "c")}
    cell.update(status="ok", shapeClass=None, signature=None, reconciled=None,
                terminalBackward=None, terminalForward=None, limitAngleBackward=None,
                limitAngleForward=None, predictedAngle=None, selfIntersects=None, period=None,
                residualMax=None, boundaryProbe=None, error=None)
    try:
        cell["boundaryProbe"] = boundary_probe(kind, co, axes, init.theta0)
        rel, verdict = classify_coefficients(kind, *_raw(kind, co), init.theta0)
        cell["shapeClass"] = verdict.shape_class.value
        if verdict.contact_angle is not None:
            cell["predictedAngle"] = verdict.contact_angle.root
        if rel is None:
            cell["status"] = "trivial"
            return cell
        trace = integrate(rel, init, options)
        feats = extract_features(trace)
        report = reconcile(feats, verdict)
        cell["signature"] = feature_signature(feats)
        cell["reconciled"] = None if report.vacuous else report.passed
        for d, key in ((-1, "Backward"), (1, "Forward")):
            ev = trace.terminal[d]
            cell["terminal" + key] = ev.kind.value
            if ev.kind in (EventKind.BOUNDARY_CONTACT, EventKind.SLOPE_BLOWUP):
                cell["limitAngle" + key] = ev.theta
        cell["selfIntersects"] = feats.self_intersects
        cell["period"] = feats.period.length if feats.period else None
        cell["residualMax"] = trace_residual_max(trace)
        if any(ev.kind is EventKind.STEP_FAILURE for ev in trace.terminal.values()):
            cell["status"] = "stepFailure"
        if keep_trace:
            cell["_trace"] = trace
    except Exception as exc:  # noqa: BLE001 - a failing cell must not abort the sweep
        cell["status"] = "error"
        cell["error"] = f"{type(exc).__name__}: {exc}"
    return cell


def _task(args):
    kind, co, init, options, axes, keep = args
    cell = evaluate_cell(kind, co, init, options, axes, keep)
    if keep and "_trace" in cell:
        cell["_csv"] = profile_csv_text(cell.pop("_trace"))
    return cell


def worker_count(spec: SweepSpec) -> int:
    if spec.workers is not None:
        return int(spec.workers)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return n
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))


@dataclass
class PhaseDiagram:
    spec: SweepSpec
    cells: list[dict]
    wall_time: float = 0.0
    workers: int = 1

    def grid(self, column: str) -> np.ndarray:
        """Values of ``column`` arranged on the sweep grid."""
        shape = self.spec.shape if len(self.spec.shape) == 2 else (self.spec.shape[0], 1)
        out = np.empty(shape, dtype=object)
        for c in self.cells:
            out[c["i"], c["j"]] = c[column]
        return out

    def boundaries(self, column: str = "shapeClass") -> list[dict]:
        """Adjacent cell pairs whose ``column`` values differ, with the midpoint."""
        g = self.grid(column)
        by_index = {(c["i"], c["j"]): c for c in self.cells}
        names = [a.name for a in self.spec.axes]
        out = []
        for (di, dj) in ((1, 0), (0, 1)):
            for i in range(g.shape[0] - di):
                for j in range(g.shape[1] - dj):
                    u, v = g[i, j], g[i + di, j + dj]
                    if u == v:
                        continue
                    p, q = by_index[(i, j)], by_index[(i + di, j + dj)]
                    mid = {n: 0.5 * (p[n] + q[n]) for n in names}
                    out.append({"cells": [[i, j], [i + di, j + dj]], "values": [u, v], "midpoint": mid})
        return out

    @property
    def failures(self) -> list[dict]:
        return [c for c in self.cells if c["status"] in ("error", "stepFailure")]

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(DIAGRAM_COLUMNS)
        for c in self.cells:
            row = []
            for k in DIAGRAM_COLUMNS:
                v = c.get(k)
                if v is None:
                    row.append("")
                elif isinstance(v, bool):
                    row.append("true" if v else "false")
                elif isinstance(v, float):
                    row.append(repr(v))
                elif isinstance(v, dict):
                    row.append(json.dumps(v, sort_keys=True))
                else:
                    row.append(str(v))
            w.writerow(row)
        return buf.getvalue()

    def manifest(self) -> dict:
        from . import __version__
        counts: dict[str, int] = {}
        for c in self.cells:
            counts[c["status"]] = counts.get(c["status"], 0) + 1
        return {"package": "parabolic_weingarten", "version": __version__,
                "spec": self.spec.to_dict(), "specSha256": self.spec.digest(),
                "tolerances": self.spec.options.to_dict(), "cells": len(self.cells),
                "status": counts, "boundaries": len(self.boundaries()),
                "workers": self.workers, "wallTimeSeconds": self.wall_time}

    def write(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            diagram = out / "diagram.csv"
            diagram.write_text(self.csv_text())
            manifest = out / "manifest.json"
            manifest.write_text(json.dumps(self.manifest(), indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            raise SweepError(f"cannot write sweep output to {out}: {exc}") from exc
        return diagram, manifest


def run_sweep(spec: SweepSpec, progress: Callable[[int, int], None] | None = None) -> PhaseDiagram:
    """Trace, classify and reconcile every grid point, in grid order.

    Cells run in worker processes when more than one worker is allowed;
    results are collected in grid order so output does not depend on
    scheduling.  When ``spec.output_dir`` is set the diagram, manifest and
    (optionally) per-cell traces are written there.
    """
    out_dir = spec.output_dir
    if out_dir is not None:
        try:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise SweepError(f"cannot create output directory {out_dir}: {exc}") from exc
        if not os.access(out_dir, os.W_OK):
            raise SweepError(f"output directory {out_dir} is not writable")
    pts = spec.points()
    names = [a.name for a in spec.axes]
    keep = spec.write_traces and out_dir is not None
    tasks = [(spec.kind, co, spec.init, spec.options, names, keep) for _, co in pts]
    workers = min(worker_count(spec), len(tasks))
    t0 = time.perf_counter()
    if workers <= 1:
        results = []
        for k, t in enumerate(tasks):
            results.append(_task(t))
            if progress:
                progress(k + 1, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    wall = time.perf_counter() - t0
    cells = []
    for ((i, j), _), cell in zip(pts, results):
        csv_text = cell.pop("_csv", None)
        cells.append({"i": i, "j": j, **cell})
        if csv_text is not None:
            (Path(out_dir) / f"trace_{i}_{j}.csv").write_text(csv_text)
    diagram = PhaseDiagram(spec, cells, wall, workers)
    if out_dir is not None:
        diagram.write(out_dir)
    return diagram


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class B0Result:
    """Bisection answer with its sign-change certificate.

    ``b0`` is the bracket midpoint; ``predicate`` is the self-intersection
    predicate, true below ``b0`` and false above it in the expected case.
    """

    b0: float
    lower: float
    upper: float
    predicate_lower: bool
    predicate_upper: bool
    tol: float
    iterations: int
    evaluations: tuple[tuple[float, bool], ...]
    trace_lower: Trace | None = None
    trace_upper: Trace | None = None
    label: str = "empirical"

    @property
    def certified(self) -> bool:
        # b0 -/+ tol rounds to a width a few ulps over 2 tol
        width_ok = self.upper - self.lower <= 2 * self.tol * (1 + 1e-9)
        return self.predicate_lower != self.predicate_upper and width_ok

    def to_dict(self) -> dict:
        return {"b0": self.b0, "bracket": [self.lower, self.upper],
                "predicate": {"lower": self.predicate_lower, "upper": self.predicate_upper},
                "tol": self.tol, "iterations": self.iterations, "certified": self.certified,
                "evaluations": [[b, p] for b, p in self.evaluations], "label": self.label}


def self_intersects_at(b: float, a: float = 2.0, init: InitialData | None = None,
                       options: StepOptions | None = None) -> tuple[bool, Trace]:
    trace = integrate(WeingartenRelation.mean_gauss(a, b, 0.0), init, options)
    return extract_features(trace).self_intersects, trace


def find_b0(bracket: tuple[float, float] = (-0.99, -0.01), tol: float = 1e-4, a: float = 2.0,
            init: InitialData | None = None, options: StepOptions | None = None) -> B0Result:
    """Bisect ``aH + bK = 0`` in ``b`` on the self-intersection predicate.

    The returned bracket ``[b0 - tol, b0 + tol]`` has different predicate
    values at its ends; both end traces are kept.
    """
    lo, hi = map(float, bracket)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError("bracket must be a finite increasing pair")
    if not tol > 0:
        raise ValueError("tol must be positive")
    evals = []

    def pred(b):
        p, tr = self_intersects_at(b, a, init, options)
        evals.append((b, p))
        return p, tr

    p_lo, _ = pred(lo)
    p_hi, _ = pred(hi)
    if p_lo == p_hi:
        raise NoSignChangeError(
            f"self-intersection predicate is {p_lo} at both b={lo!r} and b={hi!r}")
    it = 0
    while hi - lo > 2.0 * tol:
        mid = 0.5 * (lo + hi)
        p_mid, _ = pred(mid)
        if p_mid == p_lo:
            lo = mid
        else:
            hi = mid
        it += 1
    b0 = 0.5 * (lo + hi)
    # certificate at exactly b0 -/+ tol, which contains the final bracket
    p_minus, tr_minus = pred(b0 - tol)
    p_plus, tr_plus = pred(b0 + tol)
    return B0Result(b0, b0 - tol, b0 + tol, p_minus, p_plus, tol, it, tuple(evals), tr_minus, tr_plus)
