import dataclasses
import math

import numpy as np
import pytest

from parabolic_weingarten.hyperbolic import WeingartenRelation as W
from parabolic_weingarten.mesh import (
    PROFILE_COLUMNS, BoundaryRowWarning, build_mesh, discrete_curvature_audit, graded_samples, obj_text,
    profile_csv_text, write_obj, write_profile_csv,
)
from parabolic_weingarten.ode import InsufficientDataError, integrate


def test_horosphere_is_a_flat_rectangle(preset_trace):
    mesh = build_mesh(preset_trace("principal-horosphere-line"), t_range=(-2, 2), t_count=5)
    v = mesh.vertices
    assert mesh.metadata["sampling"] == "stored"
    assert np.all(v[:, :, 2] == 1.0)
    assert np.allclose(mesh.kappa1, 1.0) and np.allclose(mesh.kappa2, 1.0)
    assert v[:, :, 1].min() == -2 and v[:, :, 1].max() == 2


def test_orbit_invariance(preset_trace):
    mesh = build_mesh(preset_trace("principal-contact"), t_count=4)
    shifted = mesh.translated(0.37)
    assert np.array_equal(shifted[:, :, [0, 2]], mesh.vertices[:, :, [0, 2]])
    for j in range(4):
        assert mesh.curvature(5, j) == mesh.curvature(5, 0)
    with pytest.raises(IndexError):
        mesh.curvature(0, 4)


def test_rows_satisfy_relation(any_preset):
    p, trace = any_preset
    mesh = build_mesh(trace, s_range=(-4.0, 4.0))
    rel = p.relation
    if rel.is_principal:
        res = mesh.kappa1 - rel.m * mesh.kappa2 - rel.n
    else:
        res = rel.a * mesh.mean + rel.b * mesh.gauss - rel.c
    assert np.max(np.abs(res)) <= 1e-8


@pytest.mark.parametrize("key", ["principal-contact", "unit-periodic"])
def test_audit_converges_second_order(preset_trace, key):
    tr = preset_trace(key)
    window = (-3.0, 3.0) if key.endswith("periodic") else None
    coarse = discrete_curvature_audit(build_mesh(tr, spacing=4e-3, s_range=window))["maxResidual"]
    fine = discrete_curvature_audit(build_mesh(tr, spacing=2e-3, s_range=window))["maxResidual"]
    assert fine < coarse / 3
    assert discrete_curvature_audit(build_mesh(tr, s_range=window))["maxResidual"] <= 1e-6


def test_circle_audit_theta_prime_constant():
    tr = integrate(W.mean_gauss(0.8, -0.2, 1))
    audit = discrete_curvature_audit(build_mesh(tr, s_range=(-1, 1)))
    assert audit["thetaPrimeSpread"] <= 1e-8


def test_graded_samples_refine_near_boundary(preset_trace):
    tr = preset_trace("principal-contact")
    s = graded_samples(tr, 1e-2)
    assert s[0] == tr.s[0] and s[-1] == tr.s[-1]
    h = np.diff(s)
    z = tr.interpolate(s[:-1])[1]
    assert h[np.argmin(z)] < h[np.argmax(z)] / 10


def test_stride_mode(preset_trace):
    tr = preset_trace("principal-periodic")
    mesh = build_mesh(tr, s_stride=7)
    assert mesh.s_samples[-1] == tr.s[-1]
    assert mesh.shape[0] == len(range(0, len(tr), 7)) + (1 if (len(tr) - 1) % 7 else 0)


def test_obj_text(preset_trace):
    mesh = build_mesh(preset_trace("principal-contact"), t_count=3, s_stride=50)
    text = obj_text(mesh)
    lines = text.splitlines()
    ns, nt = mesh.shape
    assert lines[0].startswith("# parabolic_weingarten")
    assert sum(1 for l in lines if l.startswith("v ")) == ns * nt
    faces = [l for l in lines if l.startswith("f ")]
    assert len(faces) == 2 * (ns - 1) * (nt - 1)
    idx = {int(k) for f in faces for k in f.split()[1:]}
    assert min(idx) >= 1 and max(idx) <= ns * nt
    assert "np.float64" not in text
    assert obj_text(mesh) == text


def test_write_files(tmp_path, preset_trace):
    tr = preset_trace("unit-periodic")
    p = write_obj(build_mesh(tr, s_stride=20), tmp_path / "m.obj")
    assert p.read_text().count("\nv ") > 0
    c = write_profile_csv(tr, tmp_path / "p.csv")
    rows = c.read_text().splitlines()
    assert rows[0] == ",".join(PROFILE_COLUMNS)
    assert len(rows) == len(tr) + 1
    assert profile_csv_text(tr) == c.read_text()


def test_boundary_rows_are_dropped_with_warning(preset_trace):
    tr = preset_trace("principal-contact")
    z = tr.z.copy()
    z[0] = 0.0
    bad = dataclasses.replace(tr, z=z)
    with pytest.warns(BoundaryRowWarning):
        mesh = build_mesh(bad, s_stride=1)
    assert mesh.shape[0] == len(tr) - 1


def test_argument_validation(preset_trace):
    tr = preset_trace("principal-contact")
    with pytest.raises(ValueError):
        build_mesh(tr, t_count=1)
    with pytest.raises(ValueError):
        build_mesh(tr, t_range=(1, 1))
    with pytest.raises(ValueError):
        build_mesh(tr, t_range=(0, math.inf))
    with pytest.raises(ValueError):
        build_mesh(tr, s_stride=0)
    with pytest.raises(ValueError):
        build_mesh(tr, spacing=0)
    with pytest.raises(InsufficientDataError):
        build_mesh(tr, s_range=(1e9, 2e9))
    with pytest.raises(InsufficientDataError):
        discrete_curvature_audit(build_mesh(tr, s_range=(0, 0)))


def test_row_cap_on_long_boundary_tail(preset_trace):
    from parabolic_weingarten.mesh import MAX_GRADED_ROWS, CoarsenedMeshWarning
    tr = preset_trace("principal-asymptotic")
    with pytest.warns(CoarsenedMeshWarning):
        mesh = build_mesh(tr)
    assert mesh.shape[0] <= MAX_GRADED_ROWS
    narrow = build_mesh(tr, s_range=(-3, 3), spacing=1e-2)
    assert narrow.shape[0] > 10
