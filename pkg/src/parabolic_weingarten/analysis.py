"""Empirical signature of a traced profile and its reconciliation with a verdict."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .classify import (
    AsymptoticBoundary,
    ClassificationVerdict,
    ShapeClass,
    Terminal,
)
from .intersect import first_self_intersection, intersection_point
from .ode import EventKind, Trace, numerator_denominator

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi

CONTACT_TOL = 1e-4        # radians, contact and blow-up limit angles
ASYMPTOTIC_TOL = 1e-2     # radians, limit angle read off at a finite window end
PERIOD_Z_TOL = 1e-6       # times max(z0, z)
PERIOD_THETA_TOL = 1e-8
CIRCLE_TOL = 1e-8
BOUNDARY_LAYER = 1e-6    # times z0
MONOTONE_SLACK = 1e-10    # radians of backward drift tolerated between stored angles
SIGN_FLOOR = 1e-9        # |z theta'| below this has no meaningful sign
ASYMPTOTE_HEIGHT = 1e-3    # times z0; a window end this low is sinking onto L
CIRCLE_MIN_HEIGHT = 0.1   # times z0; below it theta' = num/(z den) loses digits


class CompleteEvidence(str, enum.Enum):
    PERIODIC_EXTENSION = "PeriodicExtension"
    CONTACT_BOTH_ENDS = "BoundaryContactBothEnds"
    BLOWUP_DETECTED = "BlowupDetected"
    WINDOW_EXHAUSTED = "WindowExhausted"


@dataclass(frozen=True)
class Period:
    length: float
    translation: tuple[float, float]
    z_deviation: float
    theta_deviation: float
    half_period_symmetry: float | None = None

    def to_dict(self) -> dict:
        return {"T": self.length, "translation": list(self.translation),
                "zDeviation": self.z_deviation, "thetaDeviation": self.theta_deviation,
                "halfPeriodSymmetry": self.half_period_symmetry}


@dataclass(frozen=True)
class TraceFeatures:
    theta_monotone: int            # +1, -1, 0 for a straight line; 2 when mixed
    self_intersects: bool
    first_intersection: dict | None
    graph_over_l: bool
    min_abs_cos: float
    convexity: str                 # convex, concave, flat or mixed
    extrema: tuple[tuple[float, str], ...]
    period: Period | None
    contact_angles: dict
    blowup_angles: dict
    end_angles: dict
    end_points: dict
    terminal_kinds: dict
    complete_evidence: CompleteEvidence
    asymptotic_boundary: AsymptoticBoundary
    degenerate: bool
    z0: float
    theta_prime_spread: float | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def minima(self) -> int:
        return sum(1 for _, k in self.extrema if k == "min")

    @property
    def maxima(self) -> int:
        return sum(1 for _, k in self.extrema if k == "max")

    def to_dict(self) -> dict:
        return {
            "thetaMonotone": {1: "increasing", -1: "decreasing", 0: "degenerate"}.get(self.theta_monotone, "mixed"),
            "selfIntersects": self.self_intersects,
            "firstIntersection": self.first_intersection,
            "graphOverL": self.graph_over_l,
            "minAbsCos": self.min_abs_cos,
            "convexity": self.convexity,
            "extrema": [{"s": s, "kind": k} for s, k in self.extrema],
            "period": self.period.to_dict() if self.period else None,
            "contactAngles": {str(k): v for k, v in self.contact_angles.items()},
            "blowupAngles": {str(k): v for k, v in self.blowup_angles.items()},
            "endAngles": {str(k): v for k, v in self.end_angles.items()},
            "terminal": {str(k): v.value for k, v in self.terminal_kinds.items()},
            "completeEvidence": self.complete_evidence.value,
            "asymptoticBoundary": self.asymptotic_boundary.value,
            "degenerate": self.degenerate,
            "thetaPrimeSpread": self.theta_prime_spread,
            "notes": list(self.notes),
        }


def wrapped_abs(theta: float) -> float:
    """``|theta|`` after reduction to ``(-pi, pi]``."""
    return abs(math.remainder(theta, TWO_PI))


def polyline(trace: Trace) -> np.ndarray:
    """Profile points in arclength order, closed off by the terminal limit points."""
    pts = np.column_stack([trace.x, trace.z])
    head, tail = trace.terminal[-1], trace.terminal[1]
    extra_lo = [[head.x, head.z]] if head.kind in (EventKind.BOUNDARY_CONTACT, EventKind.SLOPE_BLOWUP) else []
    extra_hi = [[tail.x, tail.z]] if tail.kind in (EventKind.BOUNDARY_CONTACT, EventKind.SLOPE_BLOWUP) else []
    parts = [np.asarray(extra_lo).reshape(-1, 2), pts, np.asarray(extra_hi).reshape(-1, 2)]
    out = np.concatenate(parts)
    keep = np.ones(len(out), bool)
    keep[1:] = np.any(np.diff(out, axis=0) != 0.0, axis=1)
    return out[keep]


def self_intersection(trace: Trace) -> tuple[bool, dict | None]:
    if trace.degenerate:
        return False, None
    pts = polyline(trace)
    pair = first_self_intersection(pts)
    if pair is None:
        return False, None
    px, pz = intersection_point(pts, pair)
    return True, {"segments": list(pair), "x": px, "z": pz}


def _extrema(trace: Trace) -> list[tuple[float, str]]:
    out = []
    crossings = [e for e in trace.events_of(EventKind.ANGLE_CROSSING) if e.payload["multiple"] % 2 == 0]
    i0 = trace.index0
    if abs(math.sin(trace.init.theta0)) < 1e-15:
        crossings.append(None)
    for e in crossings:
        if e is None:
            s, th, tp = 0.0, trace.init.theta0, float(trace.dtheta[i0])
        else:
            s, th = e.s, e.theta
            tp = float(np.interp(e.s, trace.s, trace.dtheta))
        curv = tp * math.cos(th)
        out.append((s, "min" if curv > 0 else "max"))
    out.sort()
    return out


def _conditioned(trace: Trace) -> np.ndarray:
    """States whose ``theta'`` has a reliable sign.

    Drops the boundary layer and states where ``z theta' = kappa1 - kappa2``
    is at rounding level, as happens once the angle has converged to a root
    of the numerator.
    """
    signed = np.abs(trace.z * trace.dtheta) > SIGN_FLOOR
    return (trace.z >= BOUNDARY_LAYER * trace.init.z0) & signed


def _convexity(trace: Trace) -> str:
    if trace.degenerate:
        return "flat"
    keep = _conditioned(trace)
    zpp = trace.dtheta[keep] * np.cos(trace.theta[keep])
    zpp = zpp[np.isfinite(zpp)]
    if np.all(zpp > 0):
        return "convex"
    if np.all(zpp < 0):
        return "concave"
    return "mixed"


def _monotone(trace: Trace) -> int:
    if trace.degenerate:
        return 0
    keep = _conditioned(trace)
    tp = trace.dtheta[keep]
    tp = tp[np.isfinite(tp)]
    steps = np.diff(trace.theta[keep])
    if steps.size == 0:
        steps = np.zeros(1)
    if np.all(tp > 0) and steps.min() >= -MONOTONE_SLACK:
        return 1
    if np.all(tp < 0) and steps.max() <= MONOTONE_SLACK:
        return -1
    return 2


def _graph(trace: Trace) -> tuple[bool, float]:
    cos_t = np.abs(np.cos(trace.theta))
    min_cos = float(cos_t.min())
    if trace.degenerate:
        return min_cos > 1e-10, min_cos
    odd = [e for e in trace.events_of(EventKind.ANGLE_CROSSING) if e.payload["multiple"] % 2]
    # a vertical angle that zeroes theta' is an equilibrium: only rounding "crosses" it
    real = []
    for e in odd:
        num, den = numerator_denominator(trace.relation, e.theta)
        if not abs(num) <= SIGN_FLOOR * abs(den):
            real.append(e)
    return not real, min_cos


def detect_period(trace: Trace) -> Period | None:
    """Period from the first full turn of the tangent, verified over one period."""
    closes = trace.events_of(EventKind.PERIOD_CLOSED)
    if not closes or trace.degenerate:
        return None
    ev = min(closes, key=lambda e: abs(e.s))
    T = abs(ev.s)
    if not T > 0:
        return None
    lo, hi = trace.s[0], trace.s[-1]
    # one period [start, start + T] near s = 0 whose translate is still traced
    start = min(max(lo, -0.5 * T), hi - 2.0 * T)
    if start < lo:
        return None
    sel = (trace.s >= start) & (trace.s <= start + T)
    s_a = trace.s[sel]
    if s_a.size < 4:
        return None
    x_a, z_a, t_a = trace.x[sel], trace.z[sel], trace.theta[sel]
    x_b, z_b, t_b = trace.interpolate(np.minimum(s_a + T, hi))
    shift = 1.0 if trace.dtheta[trace.index0] > 0 else -1.0
    dz = float(np.max(np.abs(z_b - z_a)))
    dth = float(np.max(np.abs((t_b - t_a) - shift * TWO_PI)))
    dx = x_b - x_a
    translation = (float(np.median(dx)), 0.0)
    sym = None
    if abs(math.sin(trace.init.theta0)) < 1e-15:
        half = [e for e in trace.events_of(EventKind.ANGLE_CROSSING)
                if abs(e.theta - (trace.init.theta0 + shift * math.pi)) < 1e-12 and e.s * shift > 0]
        if half:
            sym = abs(2.0 * abs(half[0].s) - T)
    # the equation is invariant under (s, x, z) -> lambda (s, x, z): measure against local height
    z0 = trace.init.z0
    scale = np.maximum(z_a, z0)
    rel_dz = float(np.max(np.abs(z_b - z_a) / scale))
    if rel_dz > PERIOD_Z_TOL or dth > PERIOD_THETA_TOL or float(np.ptp(dx)) > PERIOD_Z_TOL * float(scale.max()):
        return None
    return Period(T, translation, dz, dth, sym)


def _ends(trace: Trace):
    contact, blowup, ends, points, kinds = {}, {}, {}, {}, {}
    for d in (1, -1):
        ev = trace.terminal[d]
        kinds[d] = ev.kind
        ends[d] = ev.theta
        points[d] = (ev.x, ev.z)
        if ev.kind is EventKind.BOUNDARY_CONTACT:
            contact[d] = ev.theta
        elif ev.kind is EventKind.SLOPE_BLOWUP:
            blowup[d] = ev.theta
    return contact, blowup, ends, points, kinds


def _evidence(kinds: dict, period: Period | None) -> CompleteEvidence:
    vals = set(kinds.values())
    if EventKind.SLOPE_BLOWUP in vals:
        return CompleteEvidence.BLOWUP_DETECTED
    if vals == {EventKind.BOUNDARY_CONTACT}:
        return CompleteEvidence.CONTACT_BOTH_ENDS
    if period is not None:
        return CompleteEvidence.PERIODIC_EXTENSION
    return CompleteEvidence.WINDOW_EXHAUSTED


def _label(evidence: CompleteEvidence, kinds: dict, points: dict, z0: float) -> AsymptoticBoundary:
    if evidence is CompleteEvidence.PERIODIC_EXTENSION or evidence is CompleteEvidence.BLOWUP_DETECTED:
        # every orbit t -> (x, t, z) runs off to the point at infinity
        return AsymptoticBoundary.POINT_INFINITY
    if EventKind.STEP_FAILURE in kinds.values():
        return AsymptoticBoundary.UNDETERMINED
    contacts = [points[d][0] for d in (1, -1) if kinds[d] is EventKind.BOUNDARY_CONTACT]
    if len(contacts) == 2:
        if abs(contacts[0] - contacts[1]) <= 1e-9 * z0:
            return AsymptoticBoundary.ONE_CIRCLE
        return AsymptoticBoundary.TWO_TANGENT_CIRCLES
    if len(contacts) == 1:
        # the escaping end contributes the point at infinity, closing the line into a circle
        return AsymptoticBoundary.ONE_CIRCLE
    low = [points[d][1] <= ASYMPTOTE_HEIGHT * z0 for d in (1, -1)]
    if all(low):
        # both ends sink onto L as |x| grows: L and the point at infinity form one circle
        return AsymptoticBoundary.ONE_CIRCLE
    return AsymptoticBoundary.POINT_INFINITY


def theta_prime_spread(trace: Trace) -> float:
    """Largest relative deviation of ``theta'`` from its initial value on well-conditioned states."""
    tp0 = float(trace.dtheta[trace.index0])
    keep = trace.z >= CIRCLE_MIN_HEIGHT * trace.init.z0
    dev = np.abs(trace.dtheta[keep] - tp0)
    scale = abs(tp0) if tp0 != 0.0 else 1.0
    return float(dev.max() / scale) if dev.size else 0.0


def extract_features(trace: Trace) -> TraceFeatures:
    if len(trace) == 0:
        raise ValueError("empty trace")
    contact, blowup, ends, points, kinds = _ends(trace)
    graph, min_cos = _graph(trace)
    period = detect_period(trace)
    evidence = _evidence(kinds, period)
    hits, first = self_intersection(trace)
    notes = []
    if trace.degenerate:
        notes.append("straight line: trivial feature set")
    if graph and hits:
        notes.append("polyline crossing on a graph: discretization artifact")
        hits, first = False, None
    label = _label(evidence, kinds, points, trace.init.z0)
    if evidence is CompleteEvidence.WINDOW_EXHAUSTED:
        notes.append("asymptotic label inferred: window ends treated as escaping to infinity")
    return TraceFeatures(
        theta_monotone=_monotone(trace), self_intersects=hits, first_intersection=first,
        graph_over_l=graph, min_abs_cos=min_cos, convexity=_convexity(trace),
        extrema=tuple(_extrema(trace)) if not trace.degenerate else (),
        period=period, contact_angles=contact, blowup_angles=blowup, end_angles=ends,
        end_points=points, terminal_kinds=kinds, complete_evidence=evidence,
        asymptotic_boundary=label, degenerate=trace.degenerate, z0=trace.init.z0,
        theta_prime_spread=theta_prime_spread(trace), notes=tuple(notes))


def asymptotic_boundary(features: TraceFeatures) -> AsymptoticBoundary:
    return features.asymptotic_boundary


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    predicate: str
    predicted: object
    measured: object
    passed: bool

    def to_dict(self) -> dict:
        return {"predicate": self.predicate, "predicted": self.predicted,
                "measured": self.measured, "passed": self.passed}


@dataclass(frozen=True)
class ReconciliationReport:
    shape_class: ShapeClass
    checks: tuple[Check, ...]
    vacuous: bool
    features: TraceFeatures

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.predicate == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "vacuous": self.vacuous,
                "shapeClass": self.shape_class.value,
                "checks": [c.to_dict() for c in self.checks],
                "features": self.features.to_dict()}


_TERMINAL_EVENT = {
    Terminal.CONTACT: {EventKind.BOUNDARY_CONTACT},
    Terminal.BLOWUP: {EventKind.SLOPE_BLOWUP},
    Terminal.WINDOW: {EventKind.MAX_ARCLENGTH},
}


def _extremum_ok(kind: str, features: TraceFeatures) -> bool:
    mn, mx = features.minima, features.maxima
    if kind == "min":
        return mn >= 1 and mx == 0
    if kind == "max":
        return mx >= 1 and mn == 0
    return mn >= 1 and mx >= 1


def reconcile(features: TraceFeatures, verdict: ClassificationVerdict) -> ReconciliationReport:
    """Compare every predicate the verdict asserts with its measured value."""
    if verdict.undetermined or verdict.terminal is None:
        return ReconciliationReport(verdict.shape_class, (), True, features)
    checks: list[Check] = []
    add = checks.append

    if verdict.terminal is Terminal.LINE:
        add(Check("straightLine", True, features.degenerate, features.degenerate))
    else:
        want = _TERMINAL_EVENT[verdict.terminal]
        got = {d: k.value for d, k in features.terminal_kinds.items()}
        add(Check("terminal", sorted(k.value for k in want), got,
                  all(k in want for k in features.terminal_kinds.values())))
        add(Check("thetaMonotone", "strict", features.theta_monotone, features.theta_monotone in (1, -1)))

    ca = verdict.contact_angle
    if ca is not None:
        if ca.role is Terminal.CONTACT:
            measured = features.contact_angles
            tol = CONTACT_TOL
        elif ca.role is Terminal.BLOWUP:
            measured = features.blowup_angles
            tol = CONTACT_TOL
        else:
            measured = features.end_angles
            tol = ASYMPTOTIC_TOL
        errs = {str(d): abs(wrapped_abs(t) - ca.root) for d, t in measured.items()}
        ok = len(errs) == 2 and max(errs.values()) <= tol
        add(Check(f"limitAngle[{ca.role.value if isinstance(ca.role, Terminal) else ca.role}]",
                  ca.root, {"angles": {str(d): t for d, t in measured.items()}, "error": errs}, ok))

    add(Check("periodic", verdict.periodic, features.period is not None,
              verdict.periodic == (features.period is not None)))
    if verdict.self_intersects is not None:
        add(Check("selfIntersects", verdict.self_intersects, features.self_intersects,
                  verdict.self_intersects == features.self_intersects))
    if verdict.graph_over_l is not None:
        add(Check("graphOverL", verdict.graph_over_l, features.graph_over_l,
                  verdict.graph_over_l == features.graph_over_l))
    if verdict.convexity is not None:
        add(Check("convexity", verdict.convexity, features.convexity,
                  verdict.convexity == features.convexity))
    if verdict.extremum is not None:
        add(Check("extremum", verdict.extremum, {"min": features.minima, "max": features.maxima},
                  _extremum_ok(verdict.extremum, features)))
    if verdict.complete is not None:
        ev = features.complete_evidence
        ok = (ev is CompleteEvidence.BLOWUP_DETECTED) != verdict.complete
        add(Check("complete", verdict.complete, ev.value, ok))
    if verdict.asymptotic_boundary is not AsymptoticBoundary.UNDETERMINED:
        add(Check("asymptoticBoundary", verdict.asymptotic_boundary.value,
                  features.asymptotic_boundary.value,
                  verdict.asymptotic_boundary is features.asymptotic_boundary))
    if verdict.constant_theta_prime:
        spread = features.theta_prime_spread
        add(Check("constantThetaPrime", CIRCLE_TOL, spread, spread is not None and spread <= CIRCLE_TOL))
    return ReconciliationReport(verdict.shape_class, tuple(checks), False, features)


def symmetry_deviation(trace: Trace) -> float:
    """Largest distance between the forward branch and the mirrored backward branch.

    Applies when ``sin(theta0) = 0``: the profile is then symmetric about the
    vertical line ``x = 0``.  The backward branch is interpolated at the
    forward arclengths.
    """
    if abs(math.sin(trace.init.theta0)) > 1e-15:
        raise ValueError("symmetry about s = 0 needs a horizontal initial tangent")
    i0 = trace.index0
    s_f = trace.s[i0:]
    s_f = s_f[s_f <= -trace.s[0]]
    xb, zb, _ = trace.interpolate(-s_f)
    dx = np.abs(trace.x[i0:i0 + s_f.size] + xb)
    dz = np.abs(trace.z[i0:i0 + s_f.size] - zb)
    return float(max(dx.max(), dz.max())) if s_f.size else 0.0


def reflection_deviation(trace: Trace, s0: float, samples: int = 200) -> float:
    """Mirror symmetry about the vertical line through ``s0`` where ``sin(theta) = 0``."""
    reach = min(s0 - trace.s[0], trace.s[-1] - s0)
    if reach <= 0:
        return 0.0
    u = np.linspace(0.0, reach, samples)
    xa, za, _ = trace.interpolate(s0 + u)
    xb, zb, _ = trace.interpolate(s0 - u)
    xc = float(trace.interpolate([s0])[0][0])
    return float(max(np.abs(xa + xb - 2 * xc).max(), np.abs(za - zb).max()))


def first_integral_deviation(trace: Trace) -> float:
    """Deviation from ``z (n + cos) - z0 (n + cos theta0) = (2 - m) int sin cos ds``.

    The integral is the trapezoid rule over stored states with endpoint
    corrections in ``f'`` and ``f''`` (two-point Hermite quadrature), which is
    sixth order; the plain rule drifts by ``O(h^2)`` per unit length.
    """
    rel = trace.relation
    if not rel.is_principal:
        raise TypeError("first integral applies to PrincipalLinear traces")
    if trace.degenerate:
        return 0.0
    m, n = rel.m, rel.n
    s, z, th, tp = trace.s, trace.z, trace.theta, trace.dtheta
    f = 0.5 * np.sin(2.0 * th)
    tpp = trace.theta_second()
    fp = np.cos(2.0 * th) * tp
    fpp = np.cos(2.0 * th) * tpp - 2.0 * np.sin(2.0 * th) * tp * tp
    h = np.diff(s)
    piece = (0.5 * h * (f[1:] + f[:-1]) - h * h / 10.0 * (fp[1:] - fp[:-1])
             + h ** 3 / 120.0 * (fpp[1:] + fpp[:-1]))
    cum = np.concatenate([[0.0], np.cumsum(piece)])
    i0 = trace.index0
    integral = cum - cum[i0]
    z0, t0 = trace.init.z0, trace.init.theta0
    lhs = z * (n + np.cos(th)) - z0 * (n + math.cos(t0))
    dev = np.abs(lhs - (2.0 - m) * integral)
    return float(dev[np.isfinite(dev)].max())


def feature_signature(features: TraceFeatures) -> str:
    """Coarse measured shape label, comparable across parameter cells."""
    if features.degenerate:
        return "line"
    if features.period is not None:
        return "periodic"
    kinds = set(features.terminal_kinds.values())
    if EventKind.STEP_FAILURE in kinds:
        return "failure"
    if EventKind.SLOPE_BLOWUP in kinds:
        return "blowup"
    if EventKind.BOUNDARY_CONTACT in kinds:
        return "contact"
    if features.self_intersects:
        return "window-self-intersecting"
    return "window-graph" if features.graph_over_l else "window"
