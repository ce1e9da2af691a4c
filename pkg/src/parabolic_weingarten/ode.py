"""Initial value problems for the profile curve and their event structure."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields
from typing import Any

import numpy as np

from . import _kernel as K
from .hyperbolic import (
    ProfileState,
    WeingartenRelation,
    curvatures_at,
    residual,
)

# a trace whose initial curvature is below this is the exact straight line
DEGENERATE_TOL = 1e-13


class IntegrationError(RuntimeError):
    """The stepper could not continue and no geometric event explains why."""


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class StepOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_arclength: float = 200.0
    blowup_switch: float = 1e3
    boundary_eps: float = 1e-9
    max_states: int = 2_000_000
    max_step: float = math.inf
    max_periods: int | None = None

    _ALIASES = {
        "relTol": "rel_tol", "absTol": "abs_tol", "maxArclength": "max_arclength",
        "blowupSwitch": "blowup_switch", "boundaryEps": "boundary_eps",
        "maxStates": "max_states", "maxStep": "max_step", "maxPeriods": "max_periods",
    }

    def __post_init__(self):
        if not (0 < self.rel_tol < 1 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive (rel_tol < 1)")
        if not self.max_arclength > 0:
            raise ValueError("max_arclength must be positive")
        if not self.blowup_switch > 1:
            raise ValueError("blowup_switch must exceed 1")
        if not 0 < self.boundary_eps < 1e-2:
            raise ValueError("boundary_eps must lie in (0, 1e-2)")
        if int(self.max_states) < 16:
            raise ValueError("max_states too small")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if self.max_periods is not None and int(self.max_periods) < 1:
            raise ValueError("max_periods must be a positive integer")

    @classmethod
    def from_mapping(cls, data: dict[str, Any] | None) -> "StepOptions":
        data = dict(data or {})
        kwargs = {}
        names = {f.name for f in fields(cls)}
        for key, value in data.items():
            name = cls._ALIASES.get(key, key)
            if name not in names:
                raise ValueError(f"unknown step option {key!r}")
            if name == "max_periods":
                kwargs[name] = None if value is None else int(value)
            elif name == "max_step" and value is None:
                kwargs[name] = math.inf
            else:
                kwargs[name] = int(value) if name == "max_states" else float(value)
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "relTol": self.rel_tol, "absTol": self.abs_tol,
            "maxArclength": self.max_arclength, "blowupSwitch": self.blowup_switch,
            "boundaryEps": self.boundary_eps, "maxStates": int(self.max_states),
            "maxStep": None if math.isinf(self.max_step) else self.max_step,
            "maxPeriods": self.max_periods,
        }


@dataclass(frozen=True)
class InitialData:
    z0: float = 1.0
    theta0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.z0) and self.z0 > 0):
            raise ValueError(f"z0 must be positive, got {self.z0!r}")
        if not math.isfinite(self.theta0):
            raise ValueError("theta0 must be finite")

    @property
    def x0(self) -> float:
        return 0.0


class EventKind(str, enum.Enum):
    ANGLE_CROSSING = "AngleCrossing"
    BOUNDARY_CONTACT = "BoundaryContact"
    SLOPE_BLOWUP = "SlopeBlowup"
    STRAIGHT_LINE = "StraightLineDegenerate"
    PERIOD_CLOSED = "PeriodClosed"
    MAX_ARCLENGTH = "MaxArclength"
    STEP_FAILURE = "StepFailure"


TERMINAL_KINDS = frozenset({EventKind.BOUNDARY_CONTACT, EventKind.SLOPE_BLOWUP,
                            EventKind.MAX_ARCLENGTH, EventKind.STEP_FAILURE})


@dataclass(frozen=True)
class IntegrationEvent:
    kind: EventKind
    s: float
    x: float
    z: float
    theta: float
    direction: int
    payload: dict = field(default_factory=dict)

    @property
    def terminal(self) -> bool:
        return self.kind in TERMINAL_KINDS

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "s": self.s, "x": self.x, "z": self.z,
                "theta": self.theta, "direction": self.direction, **self.payload}


@dataclass(frozen=True, eq=False)
class Trace:
    """Both branches of a profile curve, sorted by arclength.

    Terminal limit points (contact with ``z = 0``, infinite slope) are not
    stored as states; they live in the terminal events.
    """

    relation: WeingartenRelation
    init: InitialData
    options: StepOptions
    s: np.ndarray
    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    events: tuple[IntegrationEvent, ...]
    terminal: dict
    degenerate: bool = False
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.s.shape[0])

    @property
    def index0(self) -> int:
        return int(np.searchsorted(self.s, 0.0))

    def state(self, i: int) -> ProfileState:
        return ProfileState(float(self.s[i]), float(self.x[i]), float(self.z[i]),
                            float(self.theta[i]))

    def terminal_event(self, direction: int) -> IntegrationEvent:
        return self.terminal[direction]

    def events_of(self, kind: EventKind) -> list[IntegrationEvent]:
        return [e for e in self.events if e.kind is kind]

    def residuals(self) -> np.ndarray:
        """Weingarten defect at every state with ``theta'`` from the governing ODE."""
        cos_t = np.cos(self.theta)
        k1 = self.z * self.dtheta + cos_t
        k2 = cos_t
        rel = self.relation
        if rel.is_principal:
            return k1 - rel.m * k2 - rel.n
        return rel.a * 0.5 * (k1 + k2) + rel.b * (k1 * k2 - 1.0) - rel.c

    def theta_second(self) -> np.ndarray:
        """Analytic ``theta''`` at every state."""
        return theta_second(self.relation, self.z, self.theta, self.dtheta)

    def interpolate(self, s_query) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Quintic Hermite interpolation of ``(x, z, theta)`` at arclengths ``s_query``.

        Uses the exact first and second derivatives carried by the ODE.
        """
        sq = np.atleast_1d(np.asarray(s_query, dtype=float))
        if sq.size and (sq.min() < self.s[0] - 1e-12 or sq.max() > self.s[-1] + 1e-12):
            raise ValueError("query outside the traced arclength window")
        i = np.clip(np.searchsorted(self.s, sq, side="right") - 1, 0, len(self) - 2)
        h = self.s[i + 1] - self.s[i]
        u = (sq - self.s[i]) / h
        d2 = self.theta_second()
        cos_t, sin_t = np.cos(self.theta), np.sin(self.theta)
        out = []
        for val, d1v, d2v in (
            (self.x, cos_t, -sin_t * self.dtheta),
            (self.z, sin_t, cos_t * self.dtheta),
            (self.theta, self.dtheta, d2),
        ):
            out.append(_hermite5(u, h, val[i], d1v[i], d2v[i], val[i + 1], d1v[i + 1], d2v[i + 1]))
        return out[0], out[1], out[2]


def _hermite5(u, h, p0, m0, a0, p1, m1, a1):
    u2 = u * u
    u3 = u2 * u
    u4 = u3 * u
    u5 = u4 * u
    h00 = 1 - 10 * u3 + 15 * u4 - 6 * u5
    h10 = u - 6 * u3 + 8 * u4 - 3 * u5
    h20 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5
    h01 = 10 * u3 - 15 * u4 + 6 * u5
    h11 = -4 * u3 + 7 * u4 - 3 * u5
    h21 = 0.5 * u3 - u4 + 0.5 * u5
    return (h00 * p0 + h10 * h * m0 + h20 * h * h * a0
            + h01 * p1 + h11 * h * m1 + h21 * h * h * a1)


# ---------------------------------------------------------------------------
# right-hand sides

def kernel_params(relation: WeingartenRelation) -> tuple[int, float, float, float]:
    if relation.is_principal:
        return K.KIND_PRINCIPAL, relation.m, relation.n, 0.0
    if relation.on_circle_locus:
        return K.KIND_CIRCLE, relation.a, relation.b, relation.c
    return K.KIND_MEAN_GAUSS, relation.a, relation.b, relation.c


def numerator_denominator(relation: WeingartenRelation, theta):
    """``(num, den)`` with ``theta' = num / (z den)``; vectorized over ``theta``."""
    kind, p0, p1, p2 = kernel_params(relation)
    c = np.cos(theta)
    if kind == K.KIND_PRINCIPAL:
        return (p0 - 1.0) * c + p1, np.ones_like(c)
    sn = np.sin(theta)
    if kind == K.KIND_MEAN_GAUSS:
        return p2 - p0 * c + p1 * sn * sn, 0.5 * p0 + p1 * c
    return 0.5 * p0 + p1 * c, np.full_like(c, -p1)


def _signal_ratio(num: float, den: float, z: float) -> float:
    if den == 0.0:
        return math.copysign(math.inf, num) if num != 0.0 else math.nan
    return num / (z * den)


def rhs_principal(state: ProfileState, relation: WeingartenRelation) -> float:
    """``theta'`` for ``kappa1 = m kappa2 + n``."""
    if not relation.is_principal:
        raise TypeError("rhs_principal needs a PrincipalLinear relation")
    if not state.z > 0:
        raise ValueError("z must be positive")
    return ((relation.m - 1.0) * math.cos(state.theta) + relation.n) / state.z


def rhs_meangauss(state: ProfileState, relation: WeingartenRelation) -> float:
    """``theta'`` for ``a H + b K = c``.

    Where ``a/2 + b cos(theta)`` vanishes the slope is infinite and a signed
    infinity is returned for the stepper to act on.
    """
    if relation.is_principal:
        raise TypeError("rhs_meangauss needs a MeanGauss relation")
    if not state.z > 0:
        raise ValueError("z must be positive")
    num, den = numerator_denominator(relation, state.theta)
    return _signal_ratio(float(num), float(den), state.z)


def theta_prime(relation: WeingartenRelation, z, theta):
    num, den = numerator_denominator(relation, theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / (z * den)


def theta_second(relation: WeingartenRelation, z, theta, dtheta):
    """``theta''`` by differentiating ``theta' = num / (z den)`` along the curve."""
    kind, p0, p1, p2 = kernel_params(relation)
    c, sn = np.cos(theta), np.sin(theta)
    num, den = numerator_denominator(relation, theta)
    if kind == K.KIND_PRINCIPAL:
        dnum, dden = -(p0 - 1.0) * sn, np.zeros_like(c)
    elif kind == K.KIND_MEAN_GAUSS:
        dnum, dden = p0 * sn + 2.0 * p1 * sn * c, -p1 * sn
    else:
        dnum, dden = -p1 * sn, np.zeros_like(c)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (dnum * dtheta - dtheta * (sn * den + z * dden * dtheta)) / (z * den)


# ---------------------------------------------------------------------------
# integration

@dataclass
class _Branch:
    states: list = field(default_factory=list)  # (s, x, z, theta) arrays per segment
    events: list = field(default_factory=list)
    terminal: IntegrationEvent | None = None


def _to_sxzt(chart: int, ts: np.ndarray, ys: np.ndarray) -> np.ndarray:
    out = np.empty((ts.shape[0], 4))
    if chart == K.CHART_S:
        out[:, 0] = ts
        out[:, 1:] = ys
    elif chart == K.CHART_THETA:
        out[:, 0:3] = ys
        out[:, 3] = ts
    else:
        out[:, 0:2] = ys[:, 0:2]
        out[:, 2] = np.exp(ts)
        out[:, 3] = ys[:, 2]
    return out


def _chart_point(chart: int, state) -> tuple[float, np.ndarray]:
    s, x, z, th = state
    if chart == K.CHART_S:
        return s, np.array([x, z, th])
    if chart == K.CHART_THETA:
        return th, np.array([s, x, z])
    return math.log(z), np.array([s, x, th])


def _blowup_target(relation: WeingartenRelation, theta: float, direction: float) -> float | None:
    """Next angle beyond ``theta`` (in ``direction``) where ``a/2 + b cos`` vanishes."""
    kind, a, b, _ = kernel_params(relation)
    if kind != K.KIND_MEAN_GAUSS or b == 0.0:
        return None
    r = -a / (2.0 * b)
    if abs(r) > 1.0:
        return None
    base = math.acos(r)
    best = None
    for root in (base, -base):
        k = math.floor((theta - root) / (2 * math.pi))
        for j in range(k - 1, k + 3):
            cand = root + 2 * math.pi * j
            ahead = (cand - theta) * direction
            if ahead > 1e-14 * max(1.0, abs(theta)) and (best is None or ahead < (best - theta) * direction):
                best = cand
    return best


def _aitken(v0: float, v1: float, v2: float) -> float:
    d1, d2 = v1 - v0, v2 - v1
    denom = d2 - d1
    if d1 == 0.0 or denom == 0.0:
        return v2
    ratio = d2 / d1
    if not 0.0 < ratio < 1.0:
        return v2
    return v2 - d2 * d2 / denom


class _BranchIntegrator:
    """Integrates one direction of the profile curve, switching charts as needed."""

    def __init__(self, relation, init, options, sigma):
        self.relation = relation
        self.init = init
        self.opts = options
        self.sigma = float(sigma)
        self.kind, self.p0, self.p1, self.p2 = kernel_params(relation)
        z0 = init.z0
        self.zlow = 1e-2 * z0
        self.z_floor = options.boundary_eps * z0
        self.u_end = math.log(self.z_floor)
        self.s_limit = options.max_arclength * z0
        self.sin_enter, self.sin_exit = 0.05, 0.02
        self.switch = options.blowup_switch
        self.switch_back = options.blowup_switch / 4.0
        self.branch = _Branch()
        self.n_states = 0

    def _run(self, chart, state, t_end, allow_switch=True, h0=None):
        t0, y0 = _chart_point(chart, state)
        if h0 is None:
            h0 = self._initial_step(chart, state)
        hmax = self.opts.max_step if chart == K.CHART_S else math.inf
        remaining = max(16, int(self.opts.max_states) - self.n_states)
        ts, ys, status = K.integrate_chart(
            chart, self.kind, self.p0, self.p1, self.p2, t0, y0, t_end,
            self.opts.rel_tol, self.opts.abs_tol, h0, hmax, remaining, self.sigma,
            self.zlow, self.sin_enter, self.sin_exit, self.switch, self.switch_back,
            self.z_floor, self.s_limit, allow_switch)
        pts = _to_sxzt(chart, ts, ys)
        return ts, ys, pts, status

    def _initial_step(self, chart, state):
        s, x, z, th = state
        if chart == K.CHART_S:
            tp = abs(K.theta_prime(self.kind, self.p0, self.p1, self.p2, z, th))
            return min(0.01 * self.init.z0, 0.05 / max(tp, 1e-300), 0.5 * z / max(abs(math.sin(th)), 1e-3))
        return 1e-3

    def _record(self, chart, ts, ys, pts):
        self.branch.states.append(pts)
        self.n_states += pts.shape[0] - 1
        th0 = self.init.theta0
        for base, spacing, skip, kind in ((0.0, 0.5 * math.pi, False, EventKind.ANGLE_CROSSING),
                                          (th0, 2.0 * math.pi, True, EventKind.PERIOD_CLOSED)):
            idx, levels, tstar, ystar = K.locate_angle_crossings(
                chart, self.kind, self.p0, self.p1, self.p2, ts, ys, base, spacing, skip)
            if idx.size == 0:
                continue
            pts_star = _to_sxzt(chart, tstar, ystar)
            for lev, p in zip(levels, pts_star):
                payload = {"angle": float(lev)}
                if kind is EventKind.ANGLE_CROSSING:
                    payload["multiple"] = int(round(lev / (0.5 * math.pi)))
                else:
                    payload["turns"] = int(round((lev - th0) / (2.0 * math.pi)))
                self.branch.events.append(IntegrationEvent(
                    kind, float(p[0]), float(p[1]), float(p[2]), float(lev), int(self.sigma), payload))

    def _terminal(self, kind, state, **payload):
        s, x, z, th = state
        self.branch.terminal = IntegrationEvent(kind, float(s), float(x), float(z), float(th),
                                                int(self.sigma), payload)

    def _finish_window(self, pts):
        """Cut a non-arclength chart at the last state inside the window and close it in ``s``."""
        inside = self.sigma * pts[:, 0] < self.s_limit
        last = pts[np.nonzero(inside)[0][-1]]
        ts, ys, pts2, status = self._run(K.CHART_S, tuple(last), self.sigma * self.s_limit,
                                         allow_switch=False)
        return last, ts, ys, pts2, status

    def run(self) -> _Branch:
        state = (0.0, 0.0, self.init.z0, self.init.theta0)
        chart = K.CHART_S
        u_marks: list[tuple[float, float]] = []
        for _ in range(400):
            if chart == K.CHART_S:
                end, chunked = self._s_chart_end(state)
                ts, ys, pts, status = self._run(chart, state, end)
                self._record(chart, ts, ys, pts)
                state = tuple(pts[-1])
                if status == K.DONE and chunked:
                    if self._periods_closed() >= self.opts.max_periods:
                        self._terminal(EventKind.MAX_ARCLENGTH, state, reason="maxPeriods")
                        return self.branch
                    continue
                if status == K.DONE:
                    self._terminal(EventKind.MAX_ARCLENGTH, state)
                    return self.branch
                if status == K.BOUNDARY:
                    self._contact_from_states(pts)
                    return self.branch
                if status == K.SWITCH_LOGZ:
                    chart = K.CHART_LOGZ
                    u_marks = []
                    continue
                if status == K.SWITCH_THETA:
                    chart = K.CHART_THETA
                    continue
                self._failure(status, state)
                return self.branch

            if chart == K.CHART_THETA:
                s, x, z, th = state
                tp = K.theta_prime(self.kind, self.p0, self.p1, self.p2, z, th)
                dir_theta = math.copysign(1.0, tp) * self.sigma
                target = _blowup_target(self.relation, th, dir_theta)
                is_root = target is not None and abs(target - th) <= math.pi
                if not is_root:
                    target = th + dir_theta * 0.5 * math.pi
                ts, ys, pts, status = self._run(chart, state, target)
                if status == K.DONE and is_root:
                    # the last point is the blow-up limit itself
                    self._record(chart, ts, ys, pts)
                    self.branch.states[-1] = pts[:-1]
                    limit = tuple(pts[-1])
                    num, den = numerator_denominator(self.relation, limit[3])
                    self._terminal(EventKind.SLOPE_BLOWUP, limit, angle=float(limit[3]),
                                   denominator=float(den), numerator=float(num))
                    return self.branch
                if status == K.S_LIMIT:
                    self._record(chart, ts, ys, pts)
                    last, ts2, ys2, pts2, st2 = self._finish_window(pts)
                    self._trim_last_segment(last)
                    self._record(K.CHART_S, ts2, ys2, pts2)
                    self._terminal(EventKind.MAX_ARCLENGTH, tuple(pts2[-1]))
                    return self.branch
                self._record(chart, ts, ys, pts)
                state = tuple(pts[-1])
                if status == K.DONE:
                    continue
                if status == K.SWITCH_S:
                    chart = K.CHART_S
                    continue
                if status == K.BOUNDARY:
                    self._contact_from_states(pts)
                    return self.branch
                self._failure(status, state)
                return self.branch

            # log-height chart
            s, x, z, th = state
            u = math.log(z)
            marks = [m for m in (self.u_end + 2.0, self.u_end + 1.0, self.u_end) if m < u - 1e-12]
            target = marks[0]
            ts, ys, pts, status = self._run(chart, state, target)
            if status == K.S_LIMIT:
                self._record(chart, ts, ys, pts)
                last, ts2, ys2, pts2, st2 = self._finish_window(pts)
                self._trim_last_segment(last)
                self._record(K.CHART_S, ts2, ys2, pts2)
                self._terminal(EventKind.MAX_ARCLENGTH, tuple(pts2[-1]))
                return self.branch
            self._record(chart, ts, ys, pts)
            state = tuple(pts[-1])
            if status == K.DONE:
                u_marks.append((target, state[3]))
                if target == self.u_end:
                    self._contact_from_marks(state, u_marks)
                    return self.branch
                continue
            if status == K.SWITCH_S:
                chart = K.CHART_S
                continue
            if status == K.SWITCH_THETA:
                chart = K.CHART_THETA
                continue
            self._failure(status, state)
            return self.branch
        self._failure(K.MAX_STEPS, state)
        return self.branch

    def _s_chart_end(self, state) -> tuple[float, bool]:
        """Next arclength target; with ``max_periods`` the window is walked in chunks."""
        full = self.sigma * self.s_limit
        if self.opts.max_periods is None:
            return full, False
        # a loop's arclength scales with its height; doubling bounds the chunk count
        zmax = max((float(seg[:, 2].max()) for seg in self.branch.states[-1:]), default=state[2])
        self._zmax = max(getattr(self, "_zmax", 0.0), zmax, self.init.z0)
        end = state[0] + self.sigma * max(4.0 * self._zmax, abs(state[0]))
        if self.sigma * end >= self.s_limit:
            return full, False
        return end, True

    def _periods_closed(self) -> int:
        return sum(1 for e in self.branch.events if e.kind is EventKind.PERIOD_CLOSED)

    def _trim_last_segment(self, last):
        seg = self.branch.states[-1]
        keep = self.sigma * seg[:, 0] <= self.sigma * last[0]
        self.branch.states[-1] = seg[keep]
        self.branch.events = [e for e in self.branch.events
                              if self.sigma * e.s <= self.sigma * last[0]]

    def _failure(self, status, state):
        reason = {K.UNDERFLOW: "step size underflow", K.MAX_STEPS: "state budget exhausted"}.get(
            status, f"stepper status {status}")
        self._terminal(EventKind.STEP_FAILURE, state, reason=reason)

    def _contact_from_marks(self, state, marks):
        s, x, z, th = state
        if len(marks) >= 3:
            angle = _aitken(marks[-3][1], marks[-2][1], marks[-1][1])
        else:
            angle = th
        self._close_contact(state, angle)

    def _contact_from_states(self, pts):
        s, x, z, th = pts[-1]
        angle = th
        if pts.shape[0] >= 2:
            z_prev, th_prev = pts[-2, 2], pts[-2, 3]
            if z_prev != z:
                angle = th + (th - th_prev) * (0.0 - z) / (z - z_prev)
        self._close_contact(tuple(pts[-1]), angle)

    def _close_contact(self, state, angle):
        s, x, z, th = state
        sn = math.sin(th)
        ds = z / abs(sn) if sn != 0.0 else 0.0
        s_c = s + self.sigma * ds
        x_c = x + self.sigma * math.cos(th) * ds
        self.branch.terminal = IntegrationEvent(
            EventKind.BOUNDARY_CONTACT, float(s_c), float(x_c), 0.0, float(angle),
            int(self.sigma), {"angle": float(angle), "lastHeight": float(z)})


LINE_MAX_SAMPLES = 2001


def _straight_line(relation, init, options) -> Trace:
    th0 = init.theta0
    c, sn = math.cos(th0), math.sin(th0)
    z0 = init.z0
    s_max = options.max_arclength * z0
    ends = {}
    terminals = {}
    for sigma in (1, -1):
        dz = sigma * sn
        if dz < 0:
            length = min(s_max, z0 / -dz)
        else:
            length = s_max
        ends[sigma] = length
    samples = []
    for sigma in (-1, 1):
        length = ends[sigma]
        # affine, so spacing only matters for plotting; cap the count on long windows
        count = min(max(2, int(math.ceil(length / min(0.5 * z0, length))) + 1), LINE_MAX_SAMPLES)
        ss = sigma * np.linspace(0.0, length, count)
        if length < s_max:
            ss = ss[:-1]  # the contact point is a limit, not a state
        samples.append(ss[::-1] if sigma < 0 else ss[1:])
    s = np.concatenate(samples)
    x = c * s
    z = z0 + sn * s
    theta = np.full_like(s, th0)
    for sigma in (1, -1):
        length = ends[sigma]
        se = sigma * length
        if length < s_max:
            terminals[sigma] = IntegrationEvent(EventKind.BOUNDARY_CONTACT, se, c * se, 0.0, th0,
                                                sigma, {"angle": th0, "lastHeight": 0.0})
        else:
            terminals[sigma] = IntegrationEvent(EventKind.MAX_ARCLENGTH, se, c * se, z0 + sn * se,
                                                th0, sigma, {})
    events = [IntegrationEvent(EventKind.STRAIGHT_LINE, 0.0, 0.0, z0, th0, 0,
                               {"thetaPrime0": 0.0})]
    events.extend(terminals.values())
    events.sort(key=lambda e: e.s)
    return _freeze(Trace(relation, init, options, s, x, z, theta, np.zeros_like(s),
                         tuple(events), terminals, degenerate=True,
                         metadata={"window": "maxArclength cutoff is an artifact choice"}))


def _freeze(trace: Trace) -> Trace:
    for arr in (trace.s, trace.x, trace.z, trace.theta, trace.dtheta):
        arr.flags.writeable = False
    return trace


def initial_theta_prime(relation: WeingartenRelation, init: InitialData) -> float:
    num, den = numerator_denominator(relation, init.theta0)
    return _signal_ratio(float(num), float(den), init.z0)


def integrate(relation: WeingartenRelation, init: InitialData | None = None,
              options: StepOptions | None = None) -> Trace:
    """Trace the profile curve in both arclength directions from ``s = 0``."""
    init = init or InitialData()
    options = options or StepOptions()
    tp0 = initial_theta_prime(relation, init)
    if not math.isfinite(tp0):
        raise IntegrationError(
            "singular initial data: a/2 + b cos(theta0) vanishes, theta'(0) is undefined")
    if abs(tp0) <= DEGENERATE_TOL:
        return _straight_line(relation, init, options)

    branches = {}
    for sigma in (1, -1):
        branches[sigma] = _BranchIntegrator(relation, init, options, sigma).run()

    fwd = np.concatenate([seg if i == 0 else seg[1:] for i, seg in enumerate(branches[1].states)])
    bwd = np.concatenate([seg if i == 0 else seg[1:] for i, seg in enumerate(branches[-1].states)])
    pts = np.concatenate([bwd[::-1], fwd[1:]])
    order = np.argsort(pts[:, 0], kind="stable")
    pts = pts[order]
    s, x, z, theta = (np.ascontiguousarray(pts[:, i]) for i in range(4))
    dtheta = theta_prime(relation, z, theta)

    events = branches[1].events + branches[-1].events
    terminals = {sigma: branches[sigma].terminal for sigma in (1, -1)}
    events.extend(terminals.values())
    events.sort(key=lambda e: e.s)
    meta = {}
    if any(t.kind is EventKind.MAX_ARCLENGTH for t in terminals.values()):
        meta["window"] = "maxArclength cutoff is an artifact choice"
    if relation.on_circle_locus:
        meta["rhs"] = "factored circle-locus form"
    return _freeze(Trace(relation, init, options, s, x, z, theta, dtheta, tuple(events),
                         terminals, degenerate=False, metadata=meta))


def second_derivative_check(trace: Trace, step: float | None = None,
                            min_height: float = 1e-3, resolution: float = 1e-3) -> dict:
    """Check the differentiated mean/Gauss relation with a finite-difference ``theta''``.

    The identity is ``(a/2 + b cos) (z theta'' - sin theta') - b z sin theta'^2 = 0``.
    ``theta''`` at each stored state is the central difference, over ``step``,
    of ``theta'`` re-evaluated at interpolated neighbouring states.  States with
    ``z < min_height * z0`` or where the stencil does not resolve ``theta'``
    (``step |theta''| > resolution |theta'|``) are excluded and counted.
    Each defect is reported relative to the size of its terms.
    """
    rel = trace.relation
    if rel.is_principal:
        raise TypeError("second_derivative_check applies to MeanGauss traces")
    if trace.degenerate:
        return {"maxDeviation": 0.0, "points": len(trace), "excluded": 0,
                "step": step, "degenerate": True}
    if len(trace) < 5:
        raise InsufficientDataError("need at least 5 states")
    z0 = trace.init.z0
    h = 1e-4 * z0 if step is None else float(step)
    if not h > 0:
        raise ValueError("step must be positive")
    s, z, th, tp = trace.s, trace.z, trace.theta, trace.dtheta
    inside = (s - h >= s[0]) & (s + h <= s[-1])
    idx = np.nonzero(inside & (z >= min_height * z0))[0]
    if idx.size == 0:
        raise InsufficientDataError("no state admits the difference stencil")
    _, zp, thp = trace.interpolate(s[idx] + h)
    _, zm, thm = trace.interpolate(s[idx] - h)
    with np.errstate(all="ignore"):
        d2 = (theta_prime(rel, zp, thp) - theta_prime(rel, zm, thm)) / (2.0 * h)
        zi, ti, pi_ = z[idx], th[idx], tp[idx]
        d = 0.5 * rel.a + rel.b * np.cos(ti)
        t1 = d * zi * d2
        t2 = d * np.sin(ti) * pi_
        t3 = rel.b * zi * np.sin(ti) * pi_ * pi_
        dev = np.abs(t1 - t2 - t3) / (1.0 + np.abs(t1) + np.abs(t2) + np.abs(t3))
        resolved = h * np.abs(d2) <= resolution * np.abs(pi_)
    ok = np.isfinite(dev) & resolved
    return {"maxDeviation": float(dev[ok].max()) if ok.any() else 0.0,
            "points": int(ok.sum()), "excluded": int(len(trace) - ok.sum()),
            "step": h, "degenerate": False}


def trace_residual_max(trace: Trace) -> float:
    r = trace.residuals()
    r = r[np.isfinite(r)]
    return float(np.abs(r).max()) if r.size else 0.0


def state_curvatures(trace: Trace, i: int):
    st = trace.state(i)
    pair = curvatures_at(st, float(trace.dtheta[i]))
    return pair, residual(trace.relation, pair)
