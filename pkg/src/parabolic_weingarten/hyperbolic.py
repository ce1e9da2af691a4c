"""Half-space conventions, principal curvatures and linear Weingarten relations.

A parabolic surface ``X(s, t) = (x(s), t, z(s))`` is generated by a profile
curve in the vertical plane ``y = 0`` parametrized by Euclidean arclength,
with tangent angle ``theta`` so that ``x' = cos(theta)`` and ``z' = sin(theta)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

# Relative tolerance used to decide that a coefficient combination vanishes.
EQ_TOL = 1e-9


class RelationKind(str, enum.Enum):
    PRINCIPAL_LINEAR = "PrincipalLinear"
    MEAN_GAUSS = "MeanGauss"


class InvalidRelationError(ValueError):
    """Raised for coefficient triples that do not define a relation."""


class ConstantPrincipalCurvature(ValueError):
    """A principal-linear relation with a zero coefficient.

    Such a relation fixes one principal curvature and has no ``(m, n)``
    normal form; callers route it to the trivial classifier.
    """

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"kappa{index} is constant ({value!r})")


def _close(u: float, v: float, scale: float = 1.0) -> bool:
    return abs(u - v) <= EQ_TOL * max(1.0, abs(scale))


@dataclass(frozen=True)
class ProfileState:
    s: float
    x: float
    z: float
    theta: float

    def __post_init__(self):
        if not self.z >= 0.0:
            raise ValueError(f"height must be non-negative, got z={self.z!r}")


@dataclass(frozen=True)
class CurvaturePair:
    kappa1: float
    kappa2: float
    h: float
    k: float


@dataclass(frozen=True)
class WeingartenRelation:
    """Normalized linear Weingarten relation.

    ``PrincipalLinear`` stores ``kappa1 = m kappa2 + n`` with ``n >= 0``;
    ``MeanGauss`` stores ``a H + b K = c`` with ``c in {0, 1}``, ``a = 2``
    when ``c = 0`` and ``a > 0`` when ``c = 1`` (``a = 0`` only for the
    constant Gauss curvature family).
    """

    kind: RelationKind
    m: float = 0.0
    n: float = 0.0
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    orientation_flipped: bool = False

    @classmethod
    def principal(cls, m: float, n: float) -> "WeingartenRelation":
        """Relation ``kappa1 = m kappa2 + n``, normalized."""
        return normalize_relation(1.0, -float(m), float(n), RelationKind.PRINCIPAL_LINEAR)

    @classmethod
    def mean_gauss(cls, a: float, b: float, c: float) -> "WeingartenRelation":
        return normalize_relation(float(a), float(b), float(c), RelationKind.MEAN_GAUSS)

    @property
    def is_principal(self) -> bool:
        return self.kind is RelationKind.PRINCIPAL_LINEAR

    @property
    def coefficients(self) -> tuple[float, ...]:
        if self.is_principal:
            return (self.m, self.n)
        return (self.a, self.b, self.c)

    @property
    def is_umbilical(self) -> bool:
        return self.is_principal and _close(self.m, 1.0) and _close(self.n, 0.0)

    @property
    def is_cmc(self) -> bool:
        if self.is_principal:
            return _close(self.m, -1.0)
        return _close(self.b, 0.0)

    @property
    def is_minimal(self) -> bool:
        if self.is_principal:
            return _close(self.m, -1.0) and _close(self.n, 0.0)
        return _close(self.b, 0.0) and _close(self.c, 0.0)

    @property
    def is_constant_gauss(self) -> bool:
        return not self.is_principal and _close(self.a, 0.0)

    @property
    def on_circle_locus(self) -> bool:
        """``aH + bK = 1`` with ``a^2 + 4b^2 + 4b = 0``: profiles are Euclidean circles."""
        if self.is_principal or not _close(self.c, 1.0) or _close(self.b, 0.0):
            return False
        return _close(self.a * self.a + 4.0 * self.b * self.b + 4.0 * self.b, 0.0)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "orientationFlipped": self.orientation_flipped}
        if self.is_principal:
            d.update(m=self.m, n=self.n)
        else:
            d.update(a=self.a, b=self.b, c=self.c)
        return d


def curvatures_at(state: ProfileState, theta_prime: float) -> CurvaturePair:
    """Principal, mean and Gauss curvature of the parabolic surface at ``state``."""
    if not state.z > 0.0:
        raise ValueError(f"curvatures need z > 0, got z={state.z!r}")
    cos_t = math.cos(state.theta)
    k1 = state.z * theta_prime + cos_t
    k2 = cos_t
    return CurvaturePair(k1, k2, 0.5 * (k1 + k2), k1 * k2 - 1.0)


def normalize_relation(raw_a: float, raw_b: float, raw_c: float,
                       kind: RelationKind | str) -> WeingartenRelation:
    """Bring ``a k1 + b k2 = c`` or ``a H + b K = c`` to canonical form.

    Reversing the orientation sends ``(k1, k2) -> (-k1, -k2)``, hence
    ``H -> -H`` while ``K = k1 k2 - 1`` is unchanged.
    """
    kind = RelationKind(kind)
    a, b, c = float(raw_a), float(raw_b), float(raw_c)
    if not all(math.isfinite(v) for v in (a, b, c)):
        raise InvalidRelationError("coefficients must be finite")
    if a == 0.0 and b == 0.0:
        raise InvalidRelationError("a and b cannot both vanish")

    if kind is RelationKind.PRINCIPAL_LINEAR:
        if a == 0.0:
            raise ConstantPrincipalCurvature(2, c / b)
        if b == 0.0:
            raise ConstantPrincipalCurvature(1, c / a)
        m, n = -b / a, c / a
        flipped = n < 0.0
        if flipped:
            n = -n
        return WeingartenRelation(kind, m=m + 0.0, n=n + 0.0, orientation_flipped=flipped)

    if c == 0.0:
        if a == 0.0:
            return WeingartenRelation(kind, a=0.0, b=1.0, c=0.0)
        scale = 2.0 / a
        return WeingartenRelation(kind, a=2.0, b=b * scale + 0.0, c=0.0)
    a, b = a / c, b / c
    flipped = a < 0.0
    if flipped:
        a = -a
    return WeingartenRelation(kind, a=a + 0.0, b=b + 0.0, c=1.0, orientation_flipped=flipped)


def residual(relation: WeingartenRelation, pair: CurvaturePair) -> float:
    """Defect of the relation at a curvature pair; zero on exact solutions."""
    if relation.is_principal:
        return pair.kappa1 - relation.m * pair.kappa2 - relation.n
    return relation.a * pair.h + relation.b * pair.k - relation.c
