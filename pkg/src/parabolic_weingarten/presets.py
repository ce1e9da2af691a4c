"""Published example parameter sets, with ``z0 = 1``."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .hyperbolic import RelationKind, WeingartenRelation
from .ode import InitialData


@dataclass(frozen=True)
class Preset:
    key: str
    kind: RelationKind
    coefficients: tuple[float, ...]
    theta0: float
    description: str

    @property
    def relation(self) -> WeingartenRelation:
        if self.kind is RelationKind.PRINCIPAL_LINEAR:
            return WeingartenRelation.principal(*self.coefficients)
        return WeingartenRelation.mean_gauss(*self.coefficients)

    @property
    def init(self) -> InitialData:
        return InitialData(1.0, self.theta0)


_P, _M = RelationKind.PRINCIPAL_LINEAR, RelationKind.MEAN_GAUSS

PRESETS: tuple[Preset, ...] = (
    Preset("principal-periodic", _P, (1.0, 2.0), 0.0, "periodic self-intersecting curve"),
    Preset("principal-minimum-loops", _P, (3.0, 1.0), 0.0, "minimum, then loops"),
    Preset("principal-convex-graph", _P, (2.0, 0.0), 0.0, "entire convex graph with a minimum"),
    Preset("principal-horosphere-line", _P, (-2.0, 3.0), 0.0, "straight line: horosphere"),
    Preset("principal-asymptotic", _P, (-2.0, 3.0), 0.5 * math.pi, "vertical start, asymptotic to the boundary"),
    Preset("principal-contact", _P, (-2.0, 1.0), 0.0, "concave graph meeting the boundary"),
    Preset("principal-orthogonal-contact", _P, (-2.0, 0.0), 0.0, "concave graph meeting the boundary orthogonally"),
    Preset("minimal-gauss-graph", _M, (2.0, 1.0, 0.0), 0.0, "concave graph meeting the boundary"),
    Preset("minimal-gauss-not-graph", _M, (2.0, -0.7, 0.0), 0.0, "meets the boundary, not a graph"),
    Preset("minimal-gauss-blowup", _M, (2.0, -3.0, 0.0), 0.0, "convex graph ending at a slope blow-up"),
    Preset("unit-concave-contact", _M, (0.5, -1.0, 1.0), 0.0, "concave graph meeting the boundary"),
    Preset("unit-concave-blowup", _M, (0.5, -0.8, 1.0), 0.0, "concave graph ending at a slope blow-up"),
    Preset("unit-periodic", _M, (0.5, -0.2, 1.0), 0.0, "periodic curve"),
    Preset("unit-minimum-blowup", _M, (0.5, 0.3, 1.0), 0.0, "minimum, ending at a slope blow-up"),
    Preset("unit-convex-blowup", _M, (2.0, -2.0, 1.0), 0.0, "convex graph ending at a slope blow-up"),
    Preset("unit-concave-contact-wide", _M, (4.0, -1.5, 1.0), 0.0, "meets the boundary past the vertical"),
    Preset("principal-inverted-convex", _P, (3.0, 1.0), math.pi, "downward start, convex graph"),
    Preset("principal-inverted-contact", _P, (-2.0, 1.0), math.pi, "downward start, meets the boundary"),
)

BY_KEY = {p.key: p for p in PRESETS}


def preset(key: str) -> Preset:
    try:
        return BY_KEY[key]
    except KeyError:
        raise KeyError(f"unknown preset {key!r}; choose from {sorted(BY_KEY)}") from None
