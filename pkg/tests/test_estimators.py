import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from parabolic_weingarten.estimators import ProfileFeaturizer, TheoremClassifier


def test_classifier_predicts_table():
    X = np.array([[1, 2], [3, 1], [2, 0], [-2, 3], [-2, 1]], float)
    clf = TheoremClassifier().fit(X)
    assert clf.predict(X).tolist() == ["PeriodicSelfIntersecting", "MinimumWithSelfIntersections", "ConvexGraph",
                                       "Horosphere", "ConcaveGraphToBoundary"]
    assert clf.n_features_in_ == 2
    assert "ConvexGraph" in clf.classes_
    assert clf.verdicts(X[:1])[0]["shapeClass"] == "PeriodicSelfIntersecting"


def test_classifier_meangauss_and_theta0():
    clf = TheoremClassifier(kind="MeanGauss").fit([[2, -3, 0]])
    assert clf.predict([[2, -3, 0]])[0] == "ConvexGraphIncomplete"
    inv = TheoremClassifier(theta0=math.pi).fit([[3, 1]])
    assert inv.predict([[3, 1]])[0] == "ConvexGraph"


def test_classifier_input_checks():
    with pytest.raises(NotFittedError):
        TheoremClassifier().predict([[1, 2]])
    with pytest.raises(ValueError):
        TheoremClassifier().fit([[1, 2, 3]])
    with pytest.raises(ValueError):
        TheoremClassifier(kind="Nope").fit([[1, 2]])


def test_clone_and_params():
    est = TheoremClassifier(kind="MeanGauss", theta0=0.5)
    c = clone(est)
    assert c.get_params() == {"kind": "MeanGauss", "theta0": 0.5}
    f = clone(ProfileFeaturizer(z0=2.0, options={"relTol": 1e-9}))
    assert f.get_params()["options"] == {"relTol": 1e-9}


def test_featurizer_columns():
    X = np.array([[1, 2], [-2, 1], [0, 1]], float)
    fz = ProfileFeaturizer()
    out = fz.fit_transform(X)
    names = fz.get_feature_names_out().tolist()
    assert out.shape == (3, len(names))
    row = dict(zip(names, out[0]))
    assert row["periodic"] == 1.0 and row["period"] > 0 and row["selfIntersects"] == 1.0
    row = dict(zip(names, out[1]))
    assert row["contact"] == 1.0 and row["graphOverL"] == 1.0
    assert abs(row["limitAngleForward"]) == pytest.approx(math.acos(1 / 3), abs=1e-4)
    assert row["residualMax"] <= 1e-8
    assert np.isnan(out[2]).all()  # constant principal curvature: nothing to trace
    assert fz.signatures(X).tolist() == ["periodic", "contact", "trivial"]


def test_featurizer_in_pipeline():
    pipe = make_pipeline(ProfileFeaturizer(kind="MeanGauss"))
    out = pipe.fit_transform([[2, -3, 0]])
    assert out[0, list(ProfileFeaturizer.FEATURES).index("blowup")] == 1.0


def test_featurizer_empty_and_mismatch():
    fz = ProfileFeaturizer().fit([[1, 2]])
    with pytest.raises(ValueError):
        fz.transform([[1, 2, 3]])
