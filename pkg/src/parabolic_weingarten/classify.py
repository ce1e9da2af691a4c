"""Qualitative predictions for profile curves, made without integrating.

Each verdict records the expected shape, the terminal behaviour of both
branches, and when relevant the algebraic equation whose root is the limit
angle at the boundary, at a slope blow-up, or at infinity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .hyperbolic import (
    EQ_TOL,
    ConstantPrincipalCurvature,
    RelationKind,
    WeingartenRelation,
    normalize_relation,
)

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12


class ShapeClass(str, enum.Enum):
    UMBILICAL_TRIVIAL = "UmbilicalTrivial"
    CONSTANT_PRINCIPAL = "ConstantPrincipalCurvature"
    CMC_TRIVIAL = "CMCTrivial"
    CONSTANT_GAUSS_TRIVIAL = "ConstantGaussTrivial"
    HOROSPHERE = "Horosphere"
    GEODESIC_PLANE = "GeodesicPlane"
    EQUIDISTANT = "EquidistantSurface"
    PERIODIC_SELF_INTERSECTING = "PeriodicSelfIntersecting"
    MINIMUM_SELF_INTERSECTING = "MinimumWithSelfIntersections"
    CONVEX_GRAPH = "ConvexGraph"
    CONCAVE_GRAPH_TO_BOUNDARY = "ConcaveGraphToBoundary"
    NOT_A_GRAPH_TO_BOUNDARY = "NotAGraphToBoundary"
    CONVEX_GRAPH_INCOMPLETE = "ConvexGraphIncomplete"
    INTERIOR_BLOWUP_INCOMPLETE = "InteriorBlowupIncomplete"
    EUCLIDEAN_CIRCLE = "EuclideanCircle"
    ASYMPTOTIC_TO_BOUNDARY = "AsymptoticToBoundary"
    UNDETERMINED = "Undetermined"


class AsymptoticBoundary(str, enum.Enum):
    POINT_INFINITY = "PointInfinity"
    ONE_CIRCLE = "OneCircle"
    TWO_TANGENT_CIRCLES = "TwoTangentCircles"
    UNDETERMINED = "Undetermined"


class Terminal(str, enum.Enum):
    """Expected end of each branch."""

    CONTACT = "contact"      # reaches z = 0
    BLOWUP = "blowup"        # theta' becomes infinite at positive height
    WINDOW = "window"        # exists for all arclength
    LINE = "line"            # straight line


class ContractViolation(ValueError):
    pass


class InconsistentRootError(ArithmeticError):
    """An equation tag with no admissible root: the verdict table is wrong."""


# Limit-angle equations, written as polynomials in u = cos(theta1).
EQUATIONS = {
    "linear-principal": "(m-1) cos(t) + n = 0",
    "contact-minimal-gauss": "2 cos(t) - b sin^2(t) = 0",
    "contact-unit": "1 - a cos(t) + b sin^2(t) = 0",
    "blowup-minimal-gauss": "1 + b cos(t) = 0",
    "blowup-unit": "a + 2 b cos(t) = 0",
}


def _poly(tag: str, co: dict) -> np.ndarray:
    """Coefficients in u = cos(theta1), highest degree first."""
    if tag == "linear-principal":
        return np.array([co["m"] - 1.0, co["n"]])
    if tag == "contact-minimal-gauss":
        b = co["b"]
        return np.array([b, 2.0, -b])
    if tag == "contact-unit":
        a, b = co["a"], co["b"]
        return np.array([-b, -a, 1.0 + b])
    if tag == "blowup-minimal-gauss":
        return np.array([co["b"], 1.0])
    if tag == "blowup-unit":
        return np.array([2.0 * co["b"], co["a"]])
    raise KeyError(f"unknown equation tag {tag!r}")


def _newton_polish(p: np.ndarray, u: float, lo: float, hi: float) -> float:
    dp = np.polyder(p)
    flo = np.polyval(p, lo)
    for _ in range(100):
        f = np.polyval(p, u)
        if f == 0.0:
            return u
        if (f > 0) == (flo > 0):
            lo, flo = u, f
        else:
            hi = u
        d = np.polyval(dp, u)
        new = u - f / d if d != 0.0 else 0.5 * (lo + hi)
        if not (min(lo, hi) <= new <= max(lo, hi)):
            new = 0.5 * (lo + hi)
        if abs(new - u) <= 1e-15:
            return new
        u = new
    return u


def contact_angle_root(tag: str, coefficients: dict) -> float:
    """Limit angle in ``(0, pi]`` for an equation tag.

    The admissible root is the largest ``cos(theta1)`` in ``[-1, 1]``: the
    first one reached when the angle leaves its initial value monotonically.
    Roots are polished by bracketed Newton iteration in ``cos(theta1)``.
    """
    p = np.trim_zeros(np.asarray(_poly(tag, coefficients), dtype=float), "f")
    if p.size <= 1:
        raise InconsistentRootError(f"{EQUATIONS[tag]} has no isolated root for {coefficients}")
    candidates = []
    for r in np.roots(p):
        if abs(r.imag) > 1e-9 * max(1.0, abs(r.real)):
            continue
        u = float(r.real)
        if -1.0 - 1e-9 <= u <= 1.0 + 1e-9:
            candidates.append(min(1.0, max(-1.0, u)))
    if not candidates:
        raise InconsistentRootError(f"{EQUATIONS[tag]} has no root with |cos| <= 1 for {coefficients}")
    u0 = max(candidates)
    step = 1e-6
    lo, hi = max(-1.0, u0 - step), min(1.0, u0 + step)
    if np.polyval(p, lo) * np.polyval(p, hi) < 0:
        u0 = _newton_polish(p, u0, lo, hi)
    theta = math.acos(min(1.0, max(-1.0, u0)))
    if theta <= 0.0:
        raise InconsistentRootError(f"{EQUATIONS[tag]} only admits theta1 = 0 for {coefficients}")
    return theta


@dataclass(frozen=True)
class ContactAngle:
    tag: str
    coefficients: dict
    root: float
    role: Terminal | str  # contact, blowup or "asymptotic"

    @property
    def equation(self) -> str:
        return EQUATIONS[self.tag]

    def to_dict(self) -> dict:
        role = self.role.value if isinstance(self.role, Terminal) else self.role
        return {"equation": self.equation, "tag": self.tag,
                "coefficients": dict(self.coefficients), "root": self.root, "role": role}


def _angle(tag, role, **co) -> ContactAngle:
    return ContactAngle(tag, co, contact_angle_root(tag, co), role)


@dataclass(frozen=True)
class ClassificationVerdict:
    """Predicted signature of a profile curve.

    ``None`` in a predicate field means the table makes no claim about it.
    """

    shape_class: ShapeClass
    theorem_ref: str
    contact_angle: ContactAngle | None = None
    complete: bool | None = None
    periodic: bool = False
    graph_over_l: bool | None = None
    asymptotic_boundary: AsymptoticBoundary = AsymptoticBoundary.UNDETERMINED
    terminal: Terminal | None = None
    self_intersects: bool | None = None
    convexity: str | None = None  # "convex" or "concave"
    extremum: str | None = None   # "min", "max" or "both"
    constant_theta_prime: bool = False
    surfaces: tuple[str, ...] = ()
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def undetermined(self) -> bool:
        return self.shape_class is ShapeClass.UNDETERMINED

    def to_dict(self) -> dict:
        return {
            "shapeClass": self.shape_class.value,
            "theoremRef": self.theorem_ref,
            "contactAngle": self.contact_angle.to_dict() if self.contact_angle else None,
            "complete": self.complete,
            "periodic": self.periodic,
            "graphOverL": self.graph_over_l,
            "asymptoticBoundary": self.asymptotic_boundary.value,
            "predictions": {
                "terminal": self.terminal.value if self.terminal else None,
                "selfIntersects": self.self_intersects,
                "convexity": self.convexity,
                "extremum": self.extremum,
                "constantThetaPrime": self.constant_theta_prime,
            },
            "surfaces": list(self.surfaces),
            "notes": list(self.notes),
        }


PI_B = AsymptoticBoundary.POINT_INFINITY
TWO_B = AsymptoticBoundary.TWO_TANGENT_CIRCLES


def _undetermined(ref: str, *notes: str) -> ClassificationVerdict:
    return ClassificationVerdict(ShapeClass.UNDETERMINED, ref, notes=tuple(notes))


def _zero(v: float, scale: float = 1.0) -> bool:
    return abs(v) <= EQ_TOL * max(1.0, abs(scale))


def _sign(v: float, scale: float = 1.0) -> int:
    return 0 if _zero(v, scale) else (1 if v > 0 else -1)


def _angle_class(theta0: float) -> str | None:
    """Reduce the initial angle to one of the treated values, if it is one."""
    r = math.remainder(theta0, TWO_PI)
    for name, target in (("0", 0.0), ("pi/2", 0.5 * math.pi), ("pi", math.pi), ("pi", -math.pi)):
        if abs(r - target) <= ANGLE_TOL * max(1.0, abs(theta0)):
            return name
    return None


def _check_principal(relation: WeingartenRelation):
    if not relation.is_principal:
        raise ContractViolation("expected a PrincipalLinear relation")
    if relation.n < 0 or relation.m == 0.0:
        raise ContractViolation("principal relation is not normalized (need n >= 0, m != 0)")


def _principal_trivial(relation: WeingartenRelation) -> ClassificationVerdict | None:
    if relation.is_umbilical or relation.is_cmc:
        return classify_trivial(relation)
    return None


def classify_principal(relation: WeingartenRelation, theta0: float = 0.0) -> ClassificationVerdict:
    """Verdict for ``kappa1 = m kappa2 + n`` with initial angle ``theta0``."""
    _check_principal(relation)
    trivial = _principal_trivial(relation)
    if trivial is not None:
        return trivial
    m, n = relation.m, relation.n
    lead = _sign(n + m - 1.0, max(abs(m), n))       # sign of theta'(0) at theta0 = 0
    split = _sign(m - n - 1.0, max(abs(m), n))      # m versus n + 1
    n_zero = _zero(n)
    where = _angle_class(theta0)

    if lead == 0:
        if where == "0":
            return ClassificationVerdict(
                ShapeClass.HOROSPHERE, "principal/theta0=0/n+m-1=0: horizontal line",
                complete=True, graph_over_l=True, asymptotic_boundary=PI_B,
                terminal=Terminal.LINE, self_intersects=False)
        if 0.0 < math.remainder(theta0, TWO_PI) % TWO_PI < TWO_PI:
            return ClassificationVerdict(
                ShapeClass.ASYMPTOTIC_TO_BOUNDARY,
                "principal/theta0 in (0,2pi)/n+m-1=0: one maximum, asymptotic to L",
                complete=True, graph_over_l=False, asymptotic_boundary=AsymptoticBoundary.ONE_CIRCLE,
                terminal=Terminal.WINDOW, self_intersects=True, extremum="max",
                contact_angle=ContactAngle("linear-principal", {"m": m, "n": n}, 0.0, "asymptotic"),
                notes=("the angle tends to a multiple of 2pi while z tends to 0",))
        return _undetermined("principal/n+m-1=0/theta0 not treated")

    periodic = ClassificationVerdict(
        ShapeClass.PERIODIC_SELF_INTERSECTING,
        "principal/n+m-1>0, m<n+1: translation invariant, twirling tangent",
        complete=True, periodic=True, graph_over_l=False, asymptotic_boundary=PI_B,
        terminal=Terminal.WINDOW, self_intersects=True, extremum="both")

    if where == "0":
        if lead > 0:
            if split < 0:
                return periodic
            if n_zero:
                return ClassificationVerdict(
                    ShapeClass.CONVEX_GRAPH, "principal/theta0=0/n+m-1>0, m>=n+1, n=0: convex graph",
                    contact_angle=_angle("linear-principal", "asymptotic", m=m, n=n),
                    complete=True, graph_over_l=True, asymptotic_boundary=PI_B,
                    terminal=Terminal.WINDOW, self_intersects=False, convexity="convex",
                    extremum="min")
            return ClassificationVerdict(
                ShapeClass.MINIMUM_SELF_INTERSECTING,
                "principal/theta0=0/n+m-1>0, m>=n+1, n>0: minimum with self-intersections",
                contact_angle=_angle("linear-principal", "asymptotic", m=m, n=n),
                complete=True, graph_over_l=False, asymptotic_boundary=PI_B,
                terminal=Terminal.WINDOW, self_intersects=True, extremum="min")
        return ClassificationVerdict(
            ShapeClass.CONCAVE_GRAPH_TO_BOUNDARY,
            "principal/theta0=0/n+m-1<0: concave graph meeting L",
            contact_angle=_angle("linear-principal", Terminal.CONTACT, m=m, n=n),
            complete=True, graph_over_l=True, asymptotic_boundary=TWO_B,
            terminal=Terminal.CONTACT, self_intersects=False, convexity="concave",
            extremum="max")

    if where == "pi":
        if lead > 0:
            if split < 0:
                return replace(periodic, theorem_ref="principal/theta0=pi/n+m-1>0, m<n+1: all angles")
            return ClassificationVerdict(
                ShapeClass.CONVEX_GRAPH,
                "principal/theta0=pi/n+m-1>0, m>=n+1: convex graph with asymptotic angle",
                contact_angle=_angle("linear-principal", "asymptotic", m=m, n=n),
                complete=True, graph_over_l=True, asymptotic_boundary=PI_B,
                terminal=Terminal.WINDOW, self_intersects=False, convexity="convex",
                extremum="min")
        return ClassificationVerdict(
            ShapeClass.NOT_A_GRAPH_TO_BOUNDARY,
            "principal/theta0=pi/n+m-1<0: angles sweep (t1, 2pi-t1), meets L twice",
            contact_angle=_angle("linear-principal", Terminal.CONTACT, m=m, n=n),
            complete=True, graph_over_l=False, asymptotic_boundary=TWO_B,
            terminal=Terminal.CONTACT, extremum="max")

    if where == "pi/2":
        if n_zero:
            return ClassificationVerdict(
                ShapeClass.GEODESIC_PLANE, "principal/theta0=pi/2/n=0: vertical line",
                complete=True, graph_over_l=False, asymptotic_boundary=AsymptoticBoundary.ONE_CIRCLE,
                terminal=Terminal.LINE, self_intersects=False)
        # re-based: pick the theta0 = 0 or theta0 = pi curve whose angle range contains pi/2
        if lead > 0:
            base = classify_principal(relation, 0.0)
        else:
            base = classify_principal(relation, math.pi)
        return replace(base, theorem_ref=base.theorem_ref + " (re-based at theta=pi/2)")

    return _undetermined("principal/theta0 not treated",
                         "only theta0 in {0, pi/2, pi} is covered by the case analysis")


def classify_meangauss(relation: WeingartenRelation, theta0: float = 0.0) -> ClassificationVerdict:
    """Verdict for ``a H + b K = c`` in normal form."""
    if relation.is_principal:
        raise ContractViolation("expected a MeanGauss relation")
    a, b, c = relation.a, relation.b, relation.c
    if c == 0.0 and a not in (0.0, 2.0):
        raise ContractViolation("c = 0 relations must be normalized to a = 2")
    if c not in (0.0, 1.0) or (c == 1.0 and a < 0.0):
        raise ContractViolation("mean/Gauss relation is not normalized")
    if relation.is_constant_gauss or (c == 1.0 and _zero(b)):
        return classify_trivial(relation)
    if _angle_class(theta0) != "0":
        return _undetermined("mean-gauss/theta0 not treated",
                             "only theta0 = 0 is covered for this family")

    if c == 0.0:
        s = _sign(b + 1.0)
        if s == 0:
            return _undetermined("mean-gauss/c=0/b=-1: theta'(0) undefined")
        if s < 0:
            return ClassificationVerdict(
                ShapeClass.CONVEX_GRAPH_INCOMPLETE, "mean-gauss/c=0/b<-1: convex graph, slope blow-up",
                contact_angle=_angle("blowup-minimal-gauss", Terminal.BLOWUP, b=b),
                complete=False, graph_over_l=True, asymptotic_boundary=PI_B,
                terminal=Terminal.BLOWUP, self_intersects=False, convexity="convex",
                extremum="min")
        if _sign(b) >= 0:
            notes = ("minimal surface",) if _zero(b) else ()
            return ClassificationVerdict(
                ShapeClass.CONCAVE_GRAPH_TO_BOUNDARY, "mean-gauss/c=0/b>=0: concave graph meeting L",
                contact_angle=_angle("contact-minimal-gauss", Terminal.CONTACT, b=b),
                complete=True, graph_over_l=True, asymptotic_boundary=TWO_B,
                terminal=Terminal.CONTACT, self_intersects=False, convexity="concave",
                extremum="max", notes=notes)
        return ClassificationVerdict(
            ShapeClass.NOT_A_GRAPH_TO_BOUNDARY, "mean-gauss/c=0/-1<b<0: not a graph, meets L",
            contact_angle=_angle("contact-minimal-gauss", Terminal.CONTACT, b=b),
            complete=True, graph_over_l=False, asymptotic_boundary=TWO_B,
            terminal=Terminal.CONTACT, extremum="max",
            notes=("embeddedness depends on the empirical threshold b0",))

    # c = 1
    if relation.on_circle_locus:
        return _circle_verdict(a, b)
    if _zero(a - 1.0):
        return ClassificationVerdict(
            ShapeClass.HOROSPHERE, "mean-gauss/c=1/a=1: horizontal line",
            complete=True, graph_over_l=True, asymptotic_boundary=PI_B,
            terminal=Terminal.LINE, self_intersects=False)
    plus = _sign(a + 2.0 * b, a)
    if plus == 0:
        return _undetermined("mean-gauss/c=1/a+2b=0: theta'(0) undefined")
    if a < 1.0:
        if plus < 0:
            if b < -(1.0 + math.sqrt(1.0 - a * a)) / 2.0:
                return ClassificationVerdict(
                    ShapeClass.CONCAVE_GRAPH_TO_BOUNDARY,
                    "mean-gauss/c=1/0<a<1, a+2b<0, b below the circle locus: concave graph meeting L",
                    contact_angle=_angle("contact-unit", Terminal.CONTACT, a=a, b=b),
                    complete=True, graph_over_l=True, asymptotic_boundary=TWO_B,
                    terminal=Terminal.CONTACT, self_intersects=False, convexity="concave",
                    extremum="max")
            return ClassificationVerdict(
                ShapeClass.INTERIOR_BLOWUP_INCOMPLETE,
                "mean-gauss/c=1/0<a<1, a+2b<0, b above the circle locus: concave graph, slope blow-up",
                contact_angle=_angle("blowup-unit", Terminal.BLOWUP, a=a, b=b),
                complete=False, graph_over_l=True, asymptotic_boundary=PI_B,
                terminal=Terminal.BLOWUP, self_intersects=False, convexity="concave",
                extremum="max")
        if _sign(a - 2.0 * b, a) > 0:
            return ClassificationVerdict(
                ShapeClass.PERIODIC_SELF_INTERSECTING,
                "mean-gauss/c=1/0<a<1, a+2b>0, a-2b>0: translation invariant",
                complete=True, periodic=True, graph_over_l=False, asymptotic_boundary=PI_B,
                terminal=Terminal.WINDOW, self_intersects=True, extremum="both")
        return ClassificationVerdict(
            ShapeClass.INTERIOR_BLOWUP_INCOMPLETE,
            "mean-gauss/c=1/0<a<1, a+2b>0, a-2b<=0: minimum, not a graph, slope blow-up",
            contact_angle=_angle("blowup-unit", Terminal.BLOWUP, a=a, b=b),
            complete=False, graph_over_l=False, asymptotic_boundary=PI_B,
            terminal=Terminal.BLOWUP, extremum="min")
    if plus < 0:
        return ClassificationVerdict(
            ShapeClass.CONVEX_GRAPH_INCOMPLETE, "mean-gauss/c=1/a>1, a+2b<0: convex graph, slope blow-up",
            contact_angle=_angle("blowup-unit", Terminal.BLOWUP, a=a, b=b),
            complete=False, graph_over_l=True, asymptotic_boundary=PI_B,
            terminal=Terminal.BLOWUP, self_intersects=False, convexity="convex",
            extremum="min")
    angle = _angle("contact-unit", Terminal.CONTACT, a=a, b=b)
    # the angle decreases monotonically from 0 to -theta1, so the curve is a
    # concave graph exactly when theta1 < pi/2
    graph = angle.root < 0.5 * math.pi
    return ClassificationVerdict(
        ShapeClass.CONCAVE_GRAPH_TO_BOUNDARY, "mean-gauss/c=1/a>1, a+2b>0: maximum, meets L",
        contact_angle=angle, complete=True, graph_over_l=graph, asymptotic_boundary=TWO_B,
        terminal=Terminal.CONTACT, self_intersects=False if graph else None,
        convexity="concave" if graph else None, extremum="max",
        notes=() if graph else ("contact angle exceeds pi/2: the arc is not a graph",))


def _circle_verdict(a: float, b: float) -> ClassificationVerdict:
    ref = "mean-gauss/c=1/a^2+4b^2+4b=0: Euclidean circle"
    ratio = -a / (2.0 * b)
    if _zero(b + 0.5):
        return ClassificationVerdict(
            ShapeClass.EUCLIDEAN_CIRCLE, ref + " of infinite radius (horizontal line)",
            complete=True, graph_over_l=True, asymptotic_boundary=PI_B,
            terminal=Terminal.LINE, self_intersects=False, constant_theta_prime=True)
    if ratio < 1.0:
        return ClassificationVerdict(
            ShapeClass.EUCLIDEAN_CIRCLE, ref + " crossing L",
            contact_angle=_angle("blowup-unit", Terminal.CONTACT, a=a, b=b),
            complete=True, graph_over_l=True, asymptotic_boundary=TWO_B,
            terminal=Terminal.CONTACT, self_intersects=False, convexity="concave",
            extremum="max", constant_theta_prime=True)
    return ClassificationVerdict(
        ShapeClass.EUCLIDEAN_CIRCLE, ref + " inside the half-space",
        complete=True, periodic=True, graph_over_l=False, asymptotic_boundary=PI_B,
        terminal=Terminal.WINDOW, extremum="both", constant_theta_prime=True)


_KAPPA2_SURFACES = ("totally geodesic plane", "equidistant surface", "horosphere")
_KAPPA1_SURFACES = _KAPPA2_SURFACES + ("Euclidean horizontal right-cylinder",)


def _constant_kappa2(value: float) -> ClassificationVerdict:
    ref = f"trivial/kappa2 constant = {value!r}"
    v = abs(value)
    if _zero(v):
        return ClassificationVerdict(ShapeClass.GEODESIC_PLANE, ref, complete=True,
                                     terminal=Terminal.LINE, surfaces=_KAPPA2_SURFACES[:1])
    if _zero(v - 1.0):
        return ClassificationVerdict(ShapeClass.HOROSPHERE, ref, complete=True,
                                     terminal=Terminal.LINE, surfaces=_KAPPA2_SURFACES[2:])
    if v < 1.0:
        return ClassificationVerdict(ShapeClass.EQUIDISTANT, ref, complete=True,
                                     terminal=Terminal.LINE, surfaces=_KAPPA2_SURFACES[1:2])
    return _undetermined(ref, "no parabolic surface: kappa2 = cos(theta) cannot exceed 1")


def classify_trivial(pattern) -> ClassificationVerdict:
    """Verdict for a trivial coefficient pattern.

    ``pattern`` is a normalized relation (umbilical, CMC or constant Gauss)
    or the :class:`ConstantPrincipalCurvature` raised by normalization.
    """
    if isinstance(pattern, ConstantPrincipalCurvature):
        if pattern.index == 2:
            return _constant_kappa2(pattern.value)
        return ClassificationVerdict(
            ShapeClass.CONSTANT_PRINCIPAL, f"trivial/kappa1 constant = {pattern.value!r}",
            complete=None, surfaces=_KAPPA1_SURFACES,
            notes=("profiles with z theta' + cos(theta) constant include Euclidean circles",))
    rel = pattern
    if not isinstance(rel, WeingartenRelation):
        raise ContractViolation("classify_trivial needs a relation or a constant-curvature pattern")
    if rel.is_principal:
        if rel.is_umbilical:
            return ClassificationVerdict(ShapeClass.UMBILICAL_TRIVIAL, "trivial/umbilical: m=1, n=0",
                                         complete=True, surfaces=_KAPPA2_SURFACES)
        if rel.is_cmc:
            return ClassificationVerdict(ShapeClass.CMC_TRIVIAL, f"trivial/constant mean curvature H={rel.n / 2!r}",
                                         notes=("minimal",) if rel.is_minimal else ())
        raise ContractViolation("not a trivial principal pattern")
    if rel.is_constant_gauss:
        return ClassificationVerdict(ShapeClass.CONSTANT_GAUSS_TRIVIAL,
                                     f"trivial/constant Gauss curvature K={rel.c / rel.b!r}")
    if _zero(rel.b) and rel.c == 1.0:
        return ClassificationVerdict(ShapeClass.CMC_TRIVIAL, f"trivial/constant mean curvature H={1.0 / rel.a!r}")
    raise ContractViolation("not a trivial mean/Gauss pattern")


def classify(relation: WeingartenRelation, theta0: float = 0.0) -> ClassificationVerdict:
    if relation.is_principal:
        return classify_principal(relation, theta0)
    return classify_meangauss(relation, theta0)


def classify_coefficients(kind: RelationKind | str, a: float, b: float, c: float,
                          theta0: float = 0.0) -> tuple[WeingartenRelation | None, ClassificationVerdict]:
    """Normalize raw coefficients and classify; constant-curvature patterns are routed."""
    try:
        rel = normalize_relation(a, b, c, kind)
    except ConstantPrincipalCurvature as exc:
        return None, classify_trivial(exc)
    return rel, classify(rel, theta0)
