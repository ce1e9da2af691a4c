import math

import pytest

from parabolic_weingarten.hyperbolic import (
    ConstantPrincipalCurvature, CurvaturePair, InvalidRelationError, ProfileState, RelationKind,
    WeingartenRelation, curvatures_at, normalize_relation, residual,
)


def pair(k1, k2):
    return CurvaturePair(k1, k2, 0.5 * (k1 + k2), k1 * k2 - 1.0)


@pytest.mark.parametrize("z, theta, tp, expected", [
    (1.0, 0.0, 0.0, (1.0, 1.0, 1.0, 0.0)),
    (1.0, math.pi / 2, 0.0, (0.0, 0.0, 0.0, -1.0)),
    (2.0, math.pi / 3, 0.25, (1.0, 0.5, 0.75, -0.5)),
])
def test_curvatures_at_hand_values(z, theta, tp, expected):
    c = curvatures_at(ProfileState(0.0, 0.0, z, theta), tp)
    assert (c.kappa1, c.kappa2, c.h, c.k) == pytest.approx(expected, abs=1e-15)


def test_curvature_pair_identities_exact():
    c = curvatures_at(ProfileState(0.0, 0.0, 0.7, 1.3), -2.9)
    assert c.h == 0.5 * (c.kappa1 + c.kappa2)
    assert c.k == c.kappa1 * c.kappa2 - 1.0


def test_curvatures_need_positive_height():
    with pytest.raises(ValueError):
        curvatures_at(ProfileState(0.0, 0.0, 0.0, 0.0), 1.0)
    with pytest.raises(ValueError):
        ProfileState(0.0, 0.0, -1.0, 0.0)


def test_orientation_reversal_negates_curvatures_at_horizontal_points():
    # theta -> theta + pi with theta' unchanged reverses the normal at sin(theta) = 0
    a = curvatures_at(ProfileState(0, 0, 1.5, 0.0), 0.4)
    b = curvatures_at(ProfileState(0, 0, 1.5, math.pi), -0.4)
    assert b.kappa1 == pytest.approx(-a.kappa1)
    assert b.kappa2 == pytest.approx(-a.kappa2)


def test_normalize_umbilical():
    r = normalize_relation(1, -1, 0, RelationKind.PRINCIPAL_LINEAR)
    assert (r.m, r.n) == (1.0, 0.0) and r.is_umbilical and not r.orientation_flipped


def test_normalize_minimal():
    r = normalize_relation(2, 0, 0, "MeanGauss")
    assert (r.a, r.b, r.c) == (2.0, 0.0, 0.0) and r.is_minimal


def test_normalize_meangauss_c_one_without_flip():
    # dividing by c = -4 already yields a = 1 > 0, so no orientation change
    r = normalize_relation(-4, 6, -4, RelationKind.MEAN_GAUSS)
    assert (r.a, r.b, r.c) == (1.0, -1.5, 1.0)
    assert not r.orientation_flipped


def test_normalize_meangauss_flip_negates_mean_keeps_gauss():
    r = normalize_relation(-4, 6, 4, RelationKind.MEAN_GAUSS)
    assert r.orientation_flipped and (r.a, r.b, r.c) == (1.0, 1.5, 1.0)
    k1, k2 = 0.3, -1.7
    raw = -4 * pair(k1, k2).h + 6 * pair(k1, k2).k - 4
    flipped = pair(-k1, -k2)
    # reversing orientation maps solutions of the raw relation to solutions of the stored one
    assert residual(r, flipped) * 4 == pytest.approx(raw)


def test_normalize_principal_flip():
    r = normalize_relation(2, -6, -4, RelationKind.PRINCIPAL_LINEAR)
    assert (r.m, r.n) == (3.0, 2.0) and r.orientation_flipped


def test_normalize_is_idempotent():
    for r in (WeingartenRelation.principal(3, 1), WeingartenRelation.mean_gauss(0.5, -0.2, 1),
              WeingartenRelation.mean_gauss(2, -3, 0)):
        if r.is_principal:
            again = normalize_relation(1, -r.m, r.n, r.kind)
        else:
            again = normalize_relation(r.a, r.b, r.c, r.kind)
        assert again == r


def test_constant_principal_patterns_route():
    with pytest.raises(ConstantPrincipalCurvature) as e:
        normalize_relation(0, 2, 1, RelationKind.PRINCIPAL_LINEAR)
    assert e.value.index == 2 and e.value.value == 0.5
    with pytest.raises(ConstantPrincipalCurvature) as e:
        normalize_relation(1, 0, 2, RelationKind.PRINCIPAL_LINEAR)
    assert e.value.index == 1 and e.value.value == 2.0


def test_all_zero_invalid():
    with pytest.raises(InvalidRelationError):
        normalize_relation(0, 0, 0, RelationKind.MEAN_GAUSS)
    with pytest.raises(InvalidRelationError):
        normalize_relation(math.nan, 1, 0, RelationKind.MEAN_GAUSS)


def test_residual_examples():
    assert residual(WeingartenRelation.principal(1, 0), pair(0.3, 0.3)) == 0.0
    assert residual(WeingartenRelation.mean_gauss(2, 0, 0), pair(0.4, -0.4)) == 0.0
    assert residual(WeingartenRelation.principal(3, 1), pair(1.0, 0.0)) == 0.0


def test_circle_locus_flag():
    assert WeingartenRelation.mean_gauss(0.8, -0.2, 1).on_circle_locus
    assert WeingartenRelation.mean_gauss(1, -0.5, 1).on_circle_locus
    assert not WeingartenRelation.mean_gauss(0.5, -0.2, 1).on_circle_locus


def test_relation_dict_shape():
    assert WeingartenRelation.principal(1, 2).to_dict() == {
        "kind": "PrincipalLinear", "m": 1.0, "n": 2.0, "orientationFlipped": False}
