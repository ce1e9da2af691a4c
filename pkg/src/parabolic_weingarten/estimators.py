"""scikit-learn compatible wrappers around classification and tracing.

Rows of ``X`` are raw coefficient vectors: ``(m, n)`` for principal
relations, ``(a, b, c)`` for mean/Gauss relations.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .analysis import extract_features, feature_signature
from .classify import ShapeClass, classify_coefficients
from .hyperbolic import RelationKind
from .ode import EventKind, InitialData, StepOptions, integrate, trace_residual_max

_WIDTH = {RelationKind.PRINCIPAL_LINEAR: 2, RelationKind.MEAN_GAUSS: 3}


def _raw_row(kind: RelationKind, row) -> tuple[float, float, float]:
    if kind is RelationKind.PRINCIPAL_LINEAR:
        return 1.0, -float(row[0]), float(row[1])
    return float(row[0]), float(row[1]), float(row[2])


class _CoefficientInput:
    kind: str

    def _validate(self, X, reset: bool):
        kind = RelationKind(self.kind)
        X = check_array(X, dtype=float)
        if X.shape[1] != _WIDTH[kind]:
            raise ValueError(f"{kind.value} rows need {_WIDTH[kind]} coefficients, got {X.shape[1]}")
        if reset:
            self.n_features_in_ = X.shape[1]
        elif X.shape[1] != self.n_features_in_:
            raise ValueError("feature count differs from fit")
        return kind, X


class TheoremClassifier(_CoefficientInput, ClassifierMixin, BaseEstimator):
    """Predict the shape class from coefficients alone, without integrating.

    Fitting learns nothing; it only records the input width and the class
    vocabulary so the estimator composes with pipelines and model selection.
    """

    def __init__(self, kind: str = "PrincipalLinear", theta0: float = 0.0):
        self.kind = kind
        self.theta0 = theta0

    def fit(self, X, y=None):
        self._validate(X, reset=True)
        self.classes_ = np.array([c.value for c in ShapeClass])
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "classes_")
        kind, X = self._validate(X, reset=False)
        return np.array([classify_coefficients(kind, *_raw_row(kind, r), self.theta0)[1].shape_class.value
                         for r in X], dtype=object)

    def verdicts(self, X) -> list[dict]:
        check_is_fitted(self, "classes_")
        kind, X = self._validate(X, reset=False)
        return [classify_coefficients(kind, *_raw_row(kind, r), self.theta0)[1].to_dict() for r in X]


class ProfileFeaturizer(_CoefficientInput, TransformerMixin, BaseEstimator):
    """Trace each coefficient row and emit measured scalars.

    Columns follow :meth:`get_feature_names_out`; angles are ``nan`` when a
    branch does not end at contact or blow-up, and the period is ``nan``
    for non-periodic profiles.
    """

    FEATURES = ("selfIntersects", "graphOverL", "periodic", "period", "limitAngleBackward",
                "limitAngleForward", "blowup", "contact", "residualMax")

    def __init__(self, kind: str = "PrincipalLinear", z0: float = 1.0, theta0: float = 0.0,
                 options: dict | None = None):
        self.kind = kind
        self.z0 = z0
        self.theta0 = theta0
        self.options = options

    def fit(self, X, y=None):
        self._validate(X, reset=True)
        self.step_options_ = StepOptions.from_mapping(self.options)
        self.init_ = InitialData(float(self.z0), float(self.theta0))
        return self

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.array(self.FEATURES, dtype=object)

    def _row(self, kind, r) -> tuple[np.ndarray, str]:
        rel, _ = classify_coefficients(kind, *_raw_row(kind, r), self.init_.theta0)
        if rel is None:
            return np.full(len(self.FEATURES), np.nan), "trivial"
        trace = integrate(rel, self.init_, self.step_options_)
        f = extract_features(trace)
        ends = []
        for d in (-1, 1):
            ev = trace.terminal[d]
            ok = ev.kind in (EventKind.BOUNDARY_CONTACT, EventKind.SLOPE_BLOWUP)
            ends.append(ev.theta if ok else np.nan)
        kinds = set(f.terminal_kinds.values())
        vals = [f.self_intersects, f.graph_over_l, f.period is not None,
                f.period.length if f.period else np.nan, ends[0], ends[1],
                EventKind.SLOPE_BLOWUP in kinds, EventKind.BOUNDARY_CONTACT in kinds,
                trace_residual_max(trace)]
        return np.array(vals, dtype=float), feature_signature(f)

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "step_options_")
        kind, X = self._validate(X, reset=False)
        return np.vstack([self._row(kind, r)[0] for r in X]) if len(X) else np.empty((0, len(self.FEATURES)))

    def signatures(self, X) -> np.ndarray:
        """Measured shape label per row (see :func:`feature_signature`)."""
        check_is_fitted(self, "step_options_")
        kind, X = self._validate(X, reset=False)
        return np.array([self._row(kind, r)[1] for r in X], dtype=object)
