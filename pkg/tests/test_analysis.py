import math

import numpy as np
import pytest

from parabolic_weingarten.analysis import (
    CompleteEvidence, detect_period, extract_features, feature_signature, first_integral_deviation,
    polyline, reconcile, reflection_deviation, symmetry_deviation, theta_prime_spread, wrapped_abs,
)
from parabolic_weingarten.classify import AsymptoticBoundary, ShapeClass, classify
from parabolic_weingarten.hyperbolic import WeingartenRelation as W
from parabolic_weingarten.ode import EventKind, InitialData, StepOptions, integrate

EXPECTED_SIGNATURE = {
    "principal-periodic": "periodic",
    "principal-minimum-loops": "window-self-intersecting",
    "principal-convex-graph": "window-graph",
    "principal-horosphere-line": "line",
    "principal-contact": "contact",
    "principal-orthogonal-contact": "contact",
    "minimal-gauss-graph": "contact",
    "minimal-gauss-blowup": "blowup",
    "unit-periodic": "periodic",
    "unit-concave-blowup": "blowup",
}


def test_every_preset_reconciles(any_preset):
    p, trace = any_preset
    report = reconcile(extract_features(trace), classify(p.relation, p.theta0))
    assert not report.vacuous
    assert report.passed, [c.to_dict() for c in report.failures()]


@pytest.mark.parametrize("key, sig", sorted(EXPECTED_SIGNATURE.items()))
def test_signatures(preset_trace, key, sig):
    assert feature_signature(extract_features(preset_trace(key))) == sig


def test_contact_features(preset_trace):
    f = extract_features(preset_trace("principal-contact"))
    assert f.graph_over_l and not f.self_intersects
    assert f.convexity == "concave" and f.theta_monotone == -1
    assert f.complete_evidence is CompleteEvidence.CONTACT_BOTH_ENDS
    assert f.asymptotic_boundary is AsymptoticBoundary.TWO_TANGENT_CIRCLES
    for t in f.contact_angles.values():
        assert wrapped_abs(t) == pytest.approx(math.acos(1 / 3), abs=1e-6)


def test_blowup_angle(preset_trace):
    f = extract_features(preset_trace("minimal-gauss-blowup"))
    assert f.complete_evidence is CompleteEvidence.BLOWUP_DETECTED
    for t in f.blowup_angles.values():
        assert wrapped_abs(t) == pytest.approx(math.acos(1 / 3), abs=1e-6)


def test_period_of_principal_periodic(preset_trace):
    tr = preset_trace("principal-periodic")
    per = detect_period(tr)
    assert per is not None and per.length > 0
    assert per.theta_deviation <= 1e-8
    # translation is horizontal
    assert abs(per.translation[1]) <= 1e-6
    z1 = tr.interpolate([0.0, per.length])[1]
    assert abs(z1[1] - z1[0]) <= 1e-6


def test_minimum_loops_has_one_minimum(preset_trace):
    f = extract_features(preset_trace("principal-minimum-loops"))
    assert f.self_intersects and f.minima == 1 and f.maxima == 0
    assert f.first_intersection is not None


def test_line_is_trivial(preset_trace):
    f = extract_features(preset_trace("principal-horosphere-line"))
    assert f.degenerate and f.theta_monotone == 0 and f.convexity == "flat"
    assert not f.self_intersects and f.period is None


def test_polyline_appends_limit_points(preset_trace):
    tr = preset_trace("principal-contact")
    pts = polyline(tr)
    assert pts[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert pts[-1, 1] == pytest.approx(0.0, abs=1e-12)
    assert len(pts) == len(tr) + 2


def test_features_to_dict_is_json_ready(preset_trace):
    import json
    d = extract_features(preset_trace("unit-periodic")).to_dict()
    assert json.loads(json.dumps(d))["period"]["T"] > 0


@pytest.mark.parametrize("key", ["principal-periodic", "principal-contact", "principal-minimum-loops",
                                 "principal-inverted-convex", "principal-asymptotic"])
def test_first_integral(preset_trace, key):
    assert first_integral_deviation(preset_trace(key)) <= 1e-5


def test_first_integral_rejects_meangauss(preset_trace):
    with pytest.raises(TypeError):
        first_integral_deviation(preset_trace("unit-periodic"))


@pytest.mark.parametrize("abc", [(2, 1, 0), (0.5, -0.2, 1), (0.5, 0.3, 1), (2, -3, 0)])
def test_symmetry_of_horizontal_start(abc):
    tr = integrate(W.mean_gauss(*abc))
    assert symmetry_deviation(tr) <= 1e-8


def test_symmetry_needs_horizontal_start(preset_trace):
    with pytest.raises(ValueError):
        symmetry_deviation(preset_trace("principal-asymptotic"))


def test_reflection_about_minimum_of_loops(preset_trace):
    tr = preset_trace("unit-periodic")
    per = detect_period(tr)
    # the maximum half a period away is also a symmetry axis
    assert reflection_deviation(tr, 0.5 * per.length) <= 1e-6


def test_circle_has_constant_theta_prime():
    tr = integrate(W.mean_gauss(0.8, -0.2, 1))
    assert theta_prime_spread(tr) <= 1e-8
    assert reconcile(extract_features(tr), classify(tr.relation)).passed


def test_circle_of_infinite_radius_is_a_line():
    assert integrate(W.mean_gauss(1, -0.5, 1)).degenerate


def test_undetermined_verdict_is_vacuous():
    rel = W.principal(1, 2)
    tr = integrate(rel, InitialData(1.0, 0.3))
    rep = reconcile(extract_features(tr), classify(rel, 0.3))
    assert rep.vacuous and rep.passed and rep.checks == ()


def test_reconcile_detects_wrong_verdict(preset_trace):
    # a contact profile judged against the periodic verdict must fail
    f = extract_features(preset_trace("principal-contact"))
    rep = reconcile(f, classify(W.principal(1, 2)))
    assert not rep.passed
    names = {c.predicate for c in rep.failures()}
    assert "periodic" in names and "terminal" in names


def test_window_features_short_window():
    tr = integrate(W.principal(2, 0), options=StepOptions(max_arclength=3.0))
    f = extract_features(tr)
    assert set(f.terminal_kinds.values()) == {EventKind.MAX_ARCLENGTH}
    assert f.complete_evidence is CompleteEvidence.WINDOW_EXHAUSTED
    assert any("inferred" in n for n in f.notes)


def test_empty_window_rejected():
    class Empty:
        def __len__(self):
            return 0
    with pytest.raises(ValueError):
        extract_features(Empty())


def test_wrapped_abs():
    assert wrapped_abs(-3 * math.pi / 2) == pytest.approx(math.pi / 2)
    assert wrapped_abs(2 * math.pi + 0.25) == pytest.approx(0.25)
    assert np.isclose(wrapped_abs(math.pi), math.pi)


def test_geodesic_plane_reconciles():
    rel = W.principal(3, 0)
    tr = integrate(rel, InitialData(1.0, math.pi / 2))
    v = classify(rel, math.pi / 2)
    assert v.shape_class is ShapeClass.GEODESIC_PLANE
    assert reconcile(extract_features(tr), v).passed
