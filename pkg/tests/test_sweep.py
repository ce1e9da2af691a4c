import json
import math
import os

import numpy as np
import pytest

from parabolic_weingarten.classify import classify_coefficients
from parabolic_weingarten.hyperbolic import RelationKind, WeingartenRelation as W
from parabolic_weingarten.ode import InitialData, StepOptions, integrate
from parabolic_weingarten.sweep import (
    DIAGRAM_COLUMNS, SWEEP_OPTIONS, THREADS_ENV, Axis, NoSignChangeError, PhaseDiagram, SweepError, SweepSpec,
    boundary_probe, evaluate_cell, find_b0, run_sweep, self_intersects_at, worker_count,
)

P = RelationKind.PRINCIPAL_LINEAR
M = RelationKind.MEAN_GAUSS


def small_spec(**kw):
    base = dict(kind=P, axes=(Axis("m", -3, 3, 13), Axis("n", 0, 3, 7)), workers=1)
    base.update(kw)
    return SweepSpec(**base)


@pytest.fixture(scope="module")
def principal_diagram():
    return run_sweep(small_spec())


class TestSpecValidation:
    def test_axis_checks(self):
        with pytest.raises(ValueError):
            Axis("m", 0, math.inf, 3)
        with pytest.raises(ValueError):
            Axis("m", 0, 1, 0)
        with pytest.raises(ValueError):
            Axis("m", 1, 0, 3)
        assert Axis("m", 2, 2, 1).values.tolist() == [2.0]

    def test_spec_checks(self):
        with pytest.raises(ValueError):
            SweepSpec(P, ())
        with pytest.raises(ValueError):
            SweepSpec(P, (Axis("m", 0, 1, 2), Axis("m", 0, 1, 2)))
        with pytest.raises(ValueError):
            SweepSpec(P, (Axis("a", 0, 1, 2),), fixed={"n": 1})
        with pytest.raises(ValueError):
            SweepSpec(P, (Axis("m", 0, 1, 2),))
        with pytest.raises(ValueError):
            SweepSpec(P, (Axis("m", 0, 1, 2),), fixed={"n": 1, "m": 0})
        with pytest.raises(ValueError):
            SweepSpec(P, (Axis("m", 0, 1, 2),), fixed={"n": math.nan})
        with pytest.raises(ValueError):
            SweepSpec(P, (Axis("m", 0, 1, 2),), fixed={"n": 1}, workers=0)

    def test_from_mapping_round_trip(self, tmp_path):
        data = {"kind": "MeanGauss", "axes": [{"name": "a", "lo": 0.5, "hi": 2, "count": 4}, ["b", -1, 0, 3]],
                "fixed": {"c": 1}, "options": {"relTol": 1e-9}, "outputDir": "out"}
        spec = SweepSpec.from_mapping(data, base_dir=tmp_path)
        assert spec.kind is M and spec.shape == (4, 3)
        assert spec.output_dir == tmp_path / "out"
        assert spec.options.rel_tol == 1e-9 and spec.options.max_periods == SWEEP_OPTIONS.max_periods
        assert len(spec.digest()) == 64
        with pytest.raises(ValueError):
            SweepSpec.from_mapping({**data, "bogus": 1})
        with pytest.raises(ValueError):
            SweepSpec.from_mapping({"axes": "m"})

    def test_points_row_major(self):
        pts = small_spec().points()
        assert len(pts) == 13 * 7
        assert pts[0] == ((0, 0), {"m": -3.0, "n": 0.0})
        assert pts[1][0] == (0, 1)


def test_one_cell_per_point_and_no_failures(principal_diagram):
    d = principal_diagram
    assert len(d.cells) == 91
    assert {(c["i"], c["j"]) for c in d.cells} == {(i, j) for i in range(13) for j in range(7)}
    assert d.failures == []


def test_boundaries_follow_case_lines(principal_diagram):
    # each verdict change sits within one cell of a case line or a trivial column
    dm, dn = 0.5, 0.5
    for b in principal_diagram.boundaries():
        m, n = b["midpoint"]["m"], b["midpoint"]["n"]
        near = [abs(n + m - 1) <= dm + dn, abs(m - n - 1) <= dm + dn, abs(m) <= dm, abs(m + 1) <= dm,
                n <= dn]
        assert any(near), b


def test_single_cell_equals_direct():
    spec = SweepSpec(P, (Axis("m", -2, -2, 1),), fixed={"n": 1.0}, workers=1)
    cell = run_sweep(spec).cells[0]
    rel, verdict = classify_coefficients(P, 1.0, 2.0, 1.0)
    tr = integrate(rel, InitialData(), SWEEP_OPTIONS)
    assert cell["shapeClass"] == verdict.shape_class.value
    assert cell["limitAngleForward"] == tr.terminal[1].theta
    assert cell["limitAngleBackward"] == tr.terminal[-1].theta
    assert cell["reconciled"] is True


def test_grid_equals_union_of_cells():
    spec = SweepSpec(P, (Axis("m", -2, 2, 3), Axis("n", 0.5, 1.5, 2)), workers=1)
    d = run_sweep(spec)
    for c in d.cells:
        single = evaluate_cell(P, {"m": c["m"], "n": c["n"]}, spec.init, spec.options, ("m", "n"))
        assert {k: c[k] for k in single} == single


def test_determinism_and_files(tmp_path):
    spec = small_spec(axes=(Axis("m", -3, 3, 7), Axis("n", 0, 3, 4)), output_dir=tmp_path / "a",
                      write_traces=True)
    d1 = run_sweep(spec)
    spec2 = small_spec(axes=spec.axes, output_dir=tmp_path / "b", write_traces=True)
    run_sweep(spec2)
    a = (tmp_path / "a" / "diagram.csv").read_text()
    assert a == (tmp_path / "b" / "diagram.csv").read_text()
    header = a.splitlines()[0].split(",")
    assert tuple(header) == DIAGRAM_COLUMNS
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert man["specSha256"] == spec.digest() and man["cells"] == 28
    assert "wallTimeSeconds" in man and man["tolerances"]["relTol"] == spec.options.rel_tol
    traces = sorted(p.name for p in (tmp_path / "a").glob("trace_*.csv"))
    ok = [c for c in d1.cells if c["status"] != "trivial"]
    assert len(traces) == len(ok)


def test_parallel_matches_serial(tmp_path):
    axes = (Axis("m", -3, 3, 5), Axis("n", 0, 2, 3))
    serial = run_sweep(small_spec(axes=axes, workers=1)).csv_text()
    parallel = run_sweep(small_spec(axes=axes, workers=2))
    assert parallel.workers == 2
    assert parallel.csv_text() == serial


def test_circle_cells_lie_on_ellipse():
    spec = SweepSpec(M, (Axis("a", 0.4, 2, 5), Axis("b", -2, 1, 16)), fixed={"c": 1.0}, workers=1)
    d = run_sweep(spec)
    circles = [c for c in d.cells if c["shapeClass"] == "EuclideanCircle"]
    assert len(circles) == 2
    for c in circles:
        assert abs(c["a"] ** 2 + 4 * c["b"] ** 2 + 4 * c["b"]) < 1e-9


def test_boundary_probe_on_case_line():
    probe = boundary_probe(P, {"m": 0.5, "n": 0.5}, ("m", "n"), 0.0)
    assert probe is not None and probe["m-"] != probe["m+"]
    assert boundary_probe(P, {"m": 2.5, "n": 0.5}, ("m", "n"), 0.0) is None


def test_cell_errors_are_captured():
    cell = evaluate_cell(M, {"a": 0.0, "b": 0.0, "c": 1.0}, InitialData(), SWEEP_OPTIONS)
    assert cell["status"] == "error" and "Error" in cell["error"]


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(SweepError):
        run_sweep(small_spec(axes=(Axis("m", 2, 2, 1),), fixed={"n": 0.5}, output_dir=blocker / "sub"))


def test_worker_count_env(monkeypatch):
    spec = SweepSpec(P, (Axis("m", 2, 2, 1),), fixed={"n": 0.5})
    monkeypatch.setenv(THREADS_ENV, "3")
    assert worker_count(spec) == 3
    monkeypatch.setenv(THREADS_ENV, "zero")
    with pytest.raises(ValueError):
        worker_count(spec)
    monkeypatch.setenv(THREADS_ENV, "0")
    with pytest.raises(ValueError):
        worker_count(spec)
    monkeypatch.delenv(THREADS_ENV)
    assert worker_count(spec) >= 1
    assert worker_count(SweepSpec(P, spec.axes, fixed={"n": 0.5}, workers=5)) == 5


def test_diagram_grid_and_progress():
    seen = []
    d = run_sweep(SweepSpec(P, (Axis("m", 1.5, 3, 4),), fixed={"n": 0.5}, workers=1),
                  progress=lambda k, n: seen.append((k, n)))
    assert seen[-1] == (4, 4)
    assert d.grid("shapeClass").shape == (4, 1)


class TestB0:
    def test_certificate(self):
        r = find_b0(tol=1e-3)
        assert r.certified and r.label == "empirical"
        assert r.predicate_lower is True and r.predicate_upper is False
        assert -1 < r.b0 < 0
        assert r.trace_lower is not None and r.trace_upper is not None
        assert r.to_dict()["certified"] is True

    def test_tolerance_halving_converges(self):
        coarse = find_b0(tol=2e-3)
        fine = find_b0(tol=1e-3)
        assert abs(coarse.b0 - fine.b0) <= coarse.tol

    def test_no_sign_change(self):
        with pytest.raises(NoSignChangeError):
            find_b0(bracket=(-0.5, -0.01), tol=1e-2)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            find_b0(bracket=(0.0, -1.0))
        with pytest.raises(ValueError):
            find_b0(tol=0.0)

    def test_predicate_endpoints(self):
        assert self_intersects_at(-0.99)[0] is True
        assert self_intersects_at(-0.01)[0] is False
