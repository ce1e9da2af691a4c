"""Compiled Dormand-Prince 5(4) stepper for the profile equations.

The profile ODE is integrated in one of three charts, each an autonomous
system with three unknowns:

* chart 0 (independent ``s``):       y = (x, z, theta)
* chart 1 (independent ``theta``):   y = (s, x, z)        -- regular where theta' blows up
* chart 2 (independent ``log z``):   y = (s, x, theta)    -- regular where z -> 0

The angle equation is always ``theta' = num(theta) / (z * den(theta))``.
"""

import math

import numpy as np

try:
    from numba import njit
except Exception:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func
        return wrap

KIND_PRINCIPAL = 0
KIND_MEAN_GAUSS = 1
KIND_CIRCLE = 2

CHART_S = 0
CHART_THETA = 1
CHART_LOGZ = 2

DONE = 0
SWITCH_THETA = 1
SWITCH_LOGZ = 2
SWITCH_S = 3
BOUNDARY = 4
S_LIMIT = 5
UNDERFLOW = 6
MAX_STEPS = 7

# Dormand-Prince tableau
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


@njit(cache=True, error_model="numpy")
def num_den(kind, p0, p1, p2, theta):
    c = math.cos(theta)
    if kind == KIND_PRINCIPAL:
        return (p0 - 1.0) * c + p1, 1.0
    sn = math.sin(theta)
    if kind == KIND_MEAN_GAUSS:
        return p2 - p0 * c + p1 * sn * sn, 0.5 * p0 + p1 * c
    # factored form on the circle locus: -2b z theta' = a + 2b cos(theta)
    return 0.5 * p0 + p1 * c, -p1


@njit(cache=True, error_model="numpy")
def theta_prime(kind, p0, p1, p2, z, theta):
    num, den = num_den(kind, p0, p1, p2, theta)
    return num / (z * den)


@njit(cache=True, error_model="numpy")
def _rhs(chart, kind, p0, p1, p2, t, y0, y1, y2, out):
    if chart == CHART_S:
        num, den = num_den(kind, p0, p1, p2, y2)
        out[0] = math.cos(y2)
        out[1] = math.sin(y2)
        out[2] = num / (y1 * den)
    elif chart == CHART_THETA:
        num, den = num_den(kind, p0, p1, p2, t)
        w = y2 * den / num
        out[0] = w
        out[1] = math.cos(t) * w
        out[2] = math.sin(t) * w
    else:
        num, den = num_den(kind, p0, p1, p2, y2)
        sn = math.sin(y2)
        q = math.exp(t) / sn
        out[0] = q
        out[1] = math.cos(y2) * q
        out[2] = num / (den * sn)


@njit(cache=True, error_model="numpy")
def dp_step(chart, kind, p0, p1, p2, t, y, h, k, ynew, err):
    """One Dormand-Prince step; ``k[0]`` must hold f(t, y) on entry.

    On exit ``k[6]`` holds f(t + h, ynew) (first-same-as-last).
    """
    tmp = np.empty(3)
    for i in range(3):
        tmp[i] = y[i] + h * A21 * k[0, i]
    _rhs(chart, kind, p0, p1, p2, t + C2 * h, tmp[0], tmp[1], tmp[2], k[1])
    for i in range(3):
        tmp[i] = y[i] + h * (A31 * k[0, i] + A32 * k[1, i])
    _rhs(chart, kind, p0, p1, p2, t + C3 * h, tmp[0], tmp[1], tmp[2], k[2])
    for i in range(3):
        tmp[i] = y[i] + h * (A41 * k[0, i] + A42 * k[1, i] + A43 * k[2, i])
    _rhs(chart, kind, p0, p1, p2, t + C4 * h, tmp[0], tmp[1], tmp[2], k[3])
    for i in range(3):
        tmp[i] = y[i] + h * (A51 * k[0, i] + A52 * k[1, i] + A53 * k[2, i] + A54 * k[3, i])
    _rhs(chart, kind, p0, p1, p2, t + C5 * h, tmp[0], tmp[1], tmp[2], k[4])
    for i in range(3):
        tmp[i] = y[i] + h * (A61 * k[0, i] + A62 * k[1, i] + A63 * k[2, i]
                             + A64 * k[3, i] + A65 * k[4, i])
    _rhs(chart, kind, p0, p1, p2, t + h, tmp[0], tmp[1], tmp[2], k[5])
    for i in range(3):
        ynew[i] = y[i] + h * (B1 * k[0, i] + B3 * k[2, i] + B4 * k[3, i]
                              + B5 * k[4, i] + B6 * k[5, i])
    _rhs(chart, kind, p0, p1, p2, t + h, ynew[0], ynew[1], ynew[2], k[6])
    for i in range(3):
        err[i] = h * (E1 * k[0, i] + E3 * k[2, i] + E4 * k[3, i] + E5 * k[4, i]
                      + E6 * k[5, i] + E7 * k[6, i])


@njit(cache=True, error_model="numpy")
def _theta_of(chart, t, y):
    if chart == CHART_THETA:
        return t
    return y[2]


@njit(cache=True, error_model="numpy")
def _z_of(chart, t, y):
    if chart == CHART_S:
        return y[1]
    if chart == CHART_THETA:
        return y[2]
    return math.exp(t)


@njit(cache=True, error_model="numpy")
def _s_of(chart, t, y):
    if chart == CHART_S:
        return t
    return y[0]


@njit(cache=True, error_model="numpy")
def integrate_chart(chart, kind, p0, p1, p2, t0, y0, t_end, rtol, atol, h0, hmax,
                    max_steps, sigma, zlow, sin_enter, sin_exit, switch, switch_back,
                    z_floor, s_limit, allow_switch):
    """Adaptive integration in one chart until ``t_end`` or a stop condition.

    Returns ``(ts, ys, status)`` with every accepted step, the initial point
    included.  Step control is the PI controller of Hairer & Wanner.
    """
    cap = 256
    ts = np.empty(cap)
    ys = np.empty((cap, 3))
    ts[0] = t0
    for i in range(3):
        ys[0, i] = y0[i]
    n = 1

    direction = 1.0 if t_end >= t0 else -1.0
    k = np.empty((7, 3))
    ynew = np.empty(3)
    err = np.empty(3)
    y = y0.copy()
    t = t0
    _rhs(chart, kind, p0, p1, p2, t, y[0], y[1], y[2], k[0])

    # angle components use an absolute scale, lengths a relative one
    angle_index = 2 if chart != CHART_THETA else -1
    safe, beta = 0.9, 0.04
    expo1 = 0.2 - beta * 0.75
    facc1, facc2 = 5.0, 0.1
    facold = 1e-4
    h = min(abs(h0), hmax, abs(t_end - t0))
    status = DONE
    steps = 0
    while True:
        remaining = abs(t_end - t)
        if remaining <= 1e-14 * max(1.0, abs(t)):
            status = DONE
            break
        if steps >= max_steps:
            status = MAX_STEPS
            break
        if h >= remaining:
            h = remaining
        if h < 1e-15 * max(1.0, abs(t)):
            status = UNDERFLOW
            break
        hs = direction * h
        dp_step(chart, kind, p0, p1, p2, t, y, hs, k, ynew, err)
        steps += 1
        ok = True
        for i in range(3):
            if not (math.isfinite(ynew[i]) and math.isfinite(err[i])):
                ok = False
        if ok and chart == CHART_S and ynew[1] <= 0.0:
            ok = False
        if ok and chart == CHART_THETA and ynew[2] <= 0.0:
            ok = False
        if not ok:
            h *= 0.25
            continue
        acc = 0.0
        for i in range(3):
            if i == angle_index:
                sc = atol + rtol
            else:
                sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            acc += (err[i] / sc) ** 2
        e = math.sqrt(acc / 3.0)
        fac11 = e ** expo1
        if e <= 1.0:
            t = t + hs
            if h == remaining:
                t = t_end
            for i in range(3):
                y[i] = ynew[i]
                k[0, i] = k[6, i]
            if n == cap:
                cap *= 2
                ts2 = np.empty(cap)
                ys2 = np.empty((cap, 3))
                ts2[:n] = ts[:n]
                ys2[:n] = ys[:n]
                ts, ys = ts2, ys2
            ts[n] = t
            for i in range(3):
                ys[n, i] = y[i]
            n += 1
            facold = max(e, 1e-4)
            fac = fac11 / facold ** beta
            fac = max(facc2, min(facc1, fac / safe))
            h = min(h / fac, hmax)

            theta = _theta_of(chart, t, y)
            z = _z_of(chart, t, y)
            s = _s_of(chart, t, y)
            num, den = num_den(kind, p0, p1, p2, theta)
            tp = num / (z * den)
            if chart == CHART_S:
                if z <= z_floor:
                    status = BOUNDARY
                    break
                if allow_switch:
                    if z < zlow and sigma * math.sin(theta) < -sin_enter:
                        status = SWITCH_LOGZ
                        break
                    if kind != KIND_PRINCIPAL and abs(tp) > switch:
                        status = SWITCH_THETA
                        break
            elif chart == CHART_THETA:
                if sigma * s >= s_limit:
                    status = S_LIMIT
                    break
                if z <= z_floor:
                    status = BOUNDARY
                    break
                if allow_switch and abs(tp) < switch_back:
                    status = SWITCH_S
                    break
            else:
                if sigma * s >= s_limit:
                    status = S_LIMIT
                    break
                if allow_switch:
                    if sigma * math.sin(theta) > -sin_exit:
                        status = SWITCH_S
                        break
                    if kind != KIND_PRINCIPAL and abs(tp) > switch:
                        status = SWITCH_THETA
                        break
        else:
            h = h / min(facc1, fac11 / safe)
    return ts[:n].copy(), ys[:n].copy(), status


@njit(cache=True, error_model="numpy")
def step_to(chart, kind, p0, p1, p2, t, y, h):
    """State reached from ``(t, y)`` by a single step of size ``h``."""
    k = np.empty((7, 3))
    ynew = np.empty(3)
    err = np.empty(3)
    _rhs(chart, kind, p0, p1, p2, t, y[0], y[1], y[2], k[0])
    if h == 0.0:
        return y.copy()
    dp_step(chart, kind, p0, p1, p2, t, y, h, k, ynew, err)
    return ynew


@njit(cache=True, error_model="numpy")
def _dtheta_dt(chart, kind, p0, p1, p2, t, y):
    num, den = num_den(kind, p0, p1, p2, y[2])
    if chart == CHART_S:
        return num / (y[1] * den)
    return num / (den * math.sin(y[2]))


@njit(cache=True, error_model="numpy")
def locate_angle_crossings(chart, kind, p0, p1, p2, ts, ys, base, spacing, skip_base):
    """Find every crossing of ``theta = base + j * spacing`` along the steps.

    A crossing belongs to step ``i -> i + 1`` when the level lies strictly
    beyond ``theta_i`` and no further than ``theta_{i+1}`` in the direction
    of motion.  Levels are polished by Newton iteration on single steps from
    the left end point, with bisection as a safeguard.
    """
    n = ts.shape[0]
    cap = 64
    out_i = np.empty(cap, np.int64)
    out_level = np.empty(cap)
    out_t = np.empty(cap)
    out_y = np.empty((cap, 3))
    m = 0
    for i in range(n - 1):
        th0 = _theta_of(chart, ts[i], ys[i])
        th1 = _theta_of(chart, ts[i + 1], ys[i + 1])
        if th1 == th0:
            continue
        up = th1 > th0
        if up:
            j0 = math.floor((th0 - base) / spacing) + 1
            j1 = math.floor((th1 - base) / spacing)
        else:
            j0 = math.ceil((th1 - base) / spacing)
            j1 = math.ceil((th0 - base) / spacing) - 1
        if j1 < j0:
            continue
        count = j1 - j0 + 1
        for q in range(count):
            j = j0 + q if up else j1 - q
            if skip_base and j == 0:
                continue
            level = base + j * spacing
            h_full = ts[i + 1] - ts[i]
            if chart == CHART_THETA:
                tau = level - ts[i]
                ystar = step_to(chart, kind, p0, p1, p2, ts[i], ys[i], tau)
            else:
                lo, hi = 0.0, h_full
                glo = th0 - level
                tau = h_full * (level - th0) / (th1 - th0)
                ystar = ys[i + 1].copy()
                for _it in range(60):
                    ystar = step_to(chart, kind, p0, p1, p2, ts[i], ys[i], tau)
                    g = ystar[2] - level
                    if g == 0.0:
                        break
                    if (g > 0.0) == (glo > 0.0):
                        lo = tau
                    else:
                        hi = tau
                    d = _dtheta_dt(chart, kind, p0, p1, p2, ts[i] + tau, ystar)
                    new = tau - g / d if d != 0.0 and math.isfinite(d) else 0.5 * (lo + hi)
                    if not ((new - lo) * (new - hi) <= 0.0):
                        new = 0.5 * (lo + hi)
                    if abs(new - tau) <= 1e-14 * max(1.0, abs(ts[i])) + 1e-15:
                        tau = new
                        ystar = step_to(chart, kind, p0, p1, p2, ts[i], ys[i], tau)
                        break
                    tau = new
            if m == cap:
                cap *= 2
                a1 = np.empty(cap, np.int64)
                a2 = np.empty(cap)
                a3 = np.empty(cap)
                a4 = np.empty((cap, 3))
                a1[:m] = out_i[:m]
                a2[:m] = out_level[:m]
                a3[:m] = out_t[:m]
                a4[:m] = out_y[:m]
                out_i, out_level, out_t, out_y = a1, a2, a3, a4
            out_i[m] = i
            out_level[m] = level
            out_t[m] = ts[i] + tau
            for c in range(3):
                out_y[m, c] = ystar[c]
            m += 1
    return out_i[:m].copy(), out_level[:m].copy(), out_t[:m].copy(), out_y[:m].copy()
