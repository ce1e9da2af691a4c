"""Parabolic surfaces ``X(s, t) = (x(s), t, z(s))`` swept from a profile trace."""

from __future__ import annotations

import io
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hyperbolic import CurvaturePair, WeingartenRelation
from .ode import InsufficientDataError, Trace, theta_prime

DEFAULT_SPACING = 1e-3   # times z0
GRADING_FLOOR = 1e-6     # times z0; rows below this height are not generated
MAX_GRADED_ROWS = 1_000_000


class BoundaryRowWarning(UserWarning):
    """Rows at or below ``z = 0`` were dropped from a mesh."""


class CoarsenedMeshWarning(UserWarning):
    """The graded grid hit the row cap and was spaced more widely than requested."""


@dataclass(frozen=True)
class ParabolicMesh:
    """Vertex grid ``(i, j) -> (x_i, t_j, z_i)``, stored row-major by ``s``.

    Every row ``i`` shares one curvature record, since the surface is
    invariant along the orbit direction ``(0, 1, 0)``.
    """

    relation: WeingartenRelation
    s_samples: np.ndarray
    t_samples: np.ndarray
    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    mean: np.ndarray
    gauss: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.s_samples.size, self.t_samples.size)

    @property
    def vertices(self) -> np.ndarray:
        ns, nt = self.shape
        v = np.empty((ns, nt, 3))
        v[:, :, 0] = self.x[:, None]
        v[:, :, 1] = self.t_samples[None, :]
        v[:, :, 2] = self.z[:, None]
        return v

    def curvature(self, i: int, j: int = 0) -> CurvaturePair:
        if not 0 <= j < self.t_samples.size:
            raise IndexError(j)
        return CurvaturePair(float(self.kappa1[i]), float(self.kappa2[i]),
                             float(self.mean[i]), float(self.gauss[i]))

    def translated(self, dt: float) -> np.ndarray:
        """Vertex grid shifted by ``dt`` along the orbit direction."""
        v = self.vertices.copy()
        v[:, :, 1] += dt
        return v


def graded_samples(trace: Trace, spacing: float, s_range: tuple[float, float] | None = None) -> np.ndarray:
    """Arclengths spaced ``spacing`` apart, refined near ``z = 0`` and large ``theta'``.

    The local step is ``spacing / w`` with ``w = max(1, z0 / z, (z theta')^2)``,
    so finite differences keep the same relative accuracy into the boundary
    layer and towards a slope blow-up, where ``z theta'`` grows like the
    inverse square root of the remaining arclength.  Long windows hugging
    ``z = 0`` would need billions of rows; the count is capped at
    ``MAX_GRADED_ROWS`` with a :class:`CoarsenedMeshWarning`.
    """
    z0 = trace.init.z0
    s, z, tp = trace.s, trace.z, trace.dtheta
    if s_range is not None:
        lo, hi = max(float(s_range[0]), s[0]), min(float(s_range[1]), s[-1])
        if not hi > lo:
            return np.empty(0)
        inner = (s > lo) & (s < hi)
        s = np.concatenate([[lo], s[inner], [hi]])
        _, z, th = trace.interpolate(s)
        tp = np.asarray(theta_prime(trace.relation, z, th), dtype=float)
    w = np.maximum.reduce([np.ones_like(s), z0 / np.maximum(z, GRADING_FLOOR * z0), (z * tp) ** 2])
    tau = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(s))])
    count = max(int(math.ceil(tau[-1] / (spacing * z0))), 1) + 1
    if count > MAX_GRADED_ROWS:
        warnings.warn(f"graded grid needs {count} rows; capped at {MAX_GRADED_ROWS} "
                      "(narrow s_range or raise spacing)", CoarsenedMeshWarning, stacklevel=3)
        count = MAX_GRADED_ROWS
    return np.interp(np.linspace(0.0, tau[-1], count), tau, s)


def build_mesh(trace: Trace, t_range: tuple[float, float] = (-1.0, 1.0), t_count: int = 2,
               s_stride: int | None = None, spacing: float = DEFAULT_SPACING,
               s_range: tuple[float, float] | None = None) -> ParabolicMesh:
    """Sweep ``trace`` along the orbit direction.

    With ``s_stride`` the rows are every ``s_stride``-th stored state;
    otherwise the profile is resampled on a graded grid of nominal step
    ``spacing * z0`` (see :func:`graded_samples`).  ``s_range`` clips rows
    to an arclength window.
    """
    if len(trace) == 0:
        raise InsufficientDataError("empty trace")
    if int(t_count) < 2:
        raise ValueError("t_count must be at least 2")
    t0, t1 = map(float, t_range)
    if not (math.isfinite(t0) and math.isfinite(t1) and t1 > t0):
        raise ValueError("t_range must be a finite increasing interval")
    rel = trace.relation

    if trace.degenerate or s_stride is not None:
        stride = 1 if s_stride is None else int(s_stride)
        if stride < 1:
            raise ValueError("s_stride must be a positive integer")
        idx = np.arange(0, len(trace), stride)
        if idx[-1] != len(trace) - 1:
            idx = np.append(idx, len(trace) - 1)
        s = trace.s[idx]
        x, z, th = trace.x[idx], trace.z[idx], trace.theta[idx]
        mode = "stored"
    else:
        if not spacing > 0:
            raise ValueError("spacing must be positive")
        s = graded_samples(trace, spacing, s_range)
        x, z, th = trace.interpolate(s)
        mode = "graded"
    if s_range is not None and mode == "stored":
        keep = (s >= s_range[0]) & (s <= s_range[1])
        s, x, z, th = s[keep], x[keep], z[keep], th[keep]

    bad = ~(z > 0.0)
    if bad.any():
        warnings.warn(f"{int(bad.sum())} boundary row(s) with z <= 0 clamped out", BoundaryRowWarning,
                      stacklevel=2)
        s, x, z, th = s[~bad], x[~bad], z[~bad], th[~bad]
    if s.size == 0:
        raise InsufficientDataError("no interior rows")

    tp = np.asarray(theta_prime(rel, z, th), dtype=float)
    k2 = np.cos(th)
    k1 = z * tp + k2
    t = np.linspace(t0, t1, int(t_count))
    return ParabolicMesh(
        relation=rel, s_samples=s, t_samples=t, x=x, z=z, theta=th, dtheta=tp,
        kappa1=k1, kappa2=k2, mean=0.5 * (k1 + k2), gauss=k1 * k2 - 1.0,
        metadata={"sampling": mode, "spacing": spacing if mode == "graded" else None,
                  "stride": s_stride, "z0": trace.init.z0, "theta0": trace.init.theta0})


def _first_derivative(s: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Second-order three-point derivative on a non-uniform grid."""
    n = s.size
    out = np.empty(n)
    h = np.diff(s)
    h0, h1 = h[:-1], h[1:]
    out[1:-1] = (-h1 / (h0 * (h0 + h1)) * f[:-2] + (h1 - h0) / (h0 * h1) * f[1:-1]
                 + h0 / (h1 * (h0 + h1)) * f[2:])
    a, b = h[0], h[1]
    out[0] = -(2 * a + b) / (a * (a + b)) * f[0] + (a + b) / (a * b) * f[1] - a / (b * (a + b)) * f[2]
    a, b = h[-1], h[-2]
    out[-1] = (2 * a + b) / (a * (a + b)) * f[-1] - (a + b) / (a * b) * f[-2] + a / (b * (a + b)) * f[-3]
    return out


def discrete_curvature_audit(mesh: ParabolicMesh) -> dict:
    """Re-derive curvatures from finite-difference ``theta'`` along the profile rows.

    ``kappa2 = cos(theta)`` is read off directly.  Reports the largest
    relative deviation of ``kappa1`` from the stored value, the largest
    Weingarten residual of the re-derived curvatures, and the relative spread
    of the differenced ``theta'`` (zero for Euclidean circles and lines).
    """
    ns = mesh.s_samples.size
    if ns < 3:
        raise InsufficientDataError("audit needs at least 3 s-samples")
    rel = mesh.relation
    tp = _first_derivative(mesh.s_samples, mesh.theta)
    k2 = np.cos(mesh.theta)
    k1 = mesh.z * tp + k2
    dev = np.abs(k1 - mesh.kappa1) / (1.0 + np.abs(mesh.kappa1))
    dev2 = np.abs(k2 - mesh.kappa2)
    if rel.is_principal:
        res = k1 - rel.m * k2 - rel.n
    else:
        res = rel.a * 0.5 * (k1 + k2) + rel.b * (k1 * k2 - 1.0) - rel.c
    ref = tp[0] if tp[0] != 0.0 else 1.0
    spread = float(np.max(np.abs(tp - tp[0])) / abs(ref))
    return {"rows": ns, "columns": mesh.t_samples.size,
            "maxKappa1Deviation": float(dev.max()), "maxKappa2Deviation": float(dev2.max()),
            "maxResidual": float(np.max(np.abs(res))), "thetaPrimeSpread": spread}


def _header(mesh: ParabolicMesh) -> list[str]:
    from . import __version__
    return [f"parabolic_weingarten {__version__}: parabolic linear Weingarten surface",
            "relation " + json.dumps(mesh.relation.to_dict(), sort_keys=True),
            "mesh " + json.dumps({"rows": mesh.shape[0], "columns": mesh.shape[1], **mesh.metadata},
                                 sort_keys=True)]


def obj_text(mesh: ParabolicMesh) -> str:
    """ASCII OBJ; each quad is split along its shorter diagonal."""
    ns, nt = mesh.shape
    v = mesh.vertices.reshape(-1, 3)
    buf = io.StringIO()
    for line in _header(mesh):
        buf.write(f"# {line}\n")
    for p in v.tolist():
        buf.write(f"v {p[0]!r} {p[1]!r} {p[2]!r}\n")
    grid = mesh.vertices
    idx = np.arange(ns * nt).reshape(ns, nt) + 1
    a, b = idx[:-1, :-1], idx[:-1, 1:]
    c, d = idx[1:, 1:], idx[1:, :-1]
    # diagonals a-c and b-d of quad (a, b, c, d)
    ac = np.linalg.norm(grid[1:, 1:] - grid[:-1, :-1], axis=2)
    bd = np.linalg.norm(grid[1:, :-1] - grid[:-1, 1:], axis=2)
    use_ac = ac <= bd
    for i in range(ns - 1):
        for j in range(nt - 1):
            if use_ac[i, j]:
                buf.write(f"f {a[i, j]} {b[i, j]} {c[i, j]}\nf {a[i, j]} {c[i, j]} {d[i, j]}\n")
            else:
                buf.write(f"f {a[i, j]} {b[i, j]} {d[i, j]}\nf {b[i, j]} {c[i, j]} {d[i, j]}\n")
    return buf.getvalue()


def write_obj(mesh: ParabolicMesh, path) -> Path:
    path = Path(path)
    path.write_text(obj_text(mesh))
    return path


PROFILE_COLUMNS = ("s", "x", "z", "theta", "kappa1", "kappa2", "H", "K")


def profile_rows(trace: Trace) -> np.ndarray:
    k2 = np.cos(trace.theta)
    k1 = trace.z * trace.dtheta + k2
    return np.column_stack([trace.s, trace.x, trace.z, trace.theta, k1, k2, 0.5 * (k1 + k2), k1 * k2 - 1.0])


def profile_csv_text(trace: Trace) -> str:
    buf = io.StringIO()
    buf.write(",".join(PROFILE_COLUMNS) + "\n")
    for row in profile_rows(trace):
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def write_profile_csv(trace: Trace, path) -> Path:
    path = Path(path)
    path.write_text(profile_csv_text(trace))
    return path
