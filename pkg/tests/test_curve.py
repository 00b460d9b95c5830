import itertools
import math
import random

import pytest

from conftest import brute_points
from ellrc.curve import INF, CurvePoint, TorsionBasis, WeierstrassCurve, search_curve
from ellrc.exceptions import InvalidParameters, PointNotOnCurve, SearchFailed, SingularCurve, TorsionNotRational
from ellrc.field import GF


@pytest.fixture(scope="module")
def long_curve():
    # long Weierstrass form with every coefficient nonzero
    return WeierstrassCurve(GF(11), 1, 2, 1, 3, 5)


def test_discriminant_hand_value(e5_gf5):
    assert int(e5_gf5.discriminant()) == 3  # -432 mod 5


def test_singular_curve_rejected():
    with pytest.raises(SingularCurve):
        WeierstrassCurve(GF(7))


def test_discriminant_survives_round_trip(long_curve):
    again = WeierstrassCurve.from_dict(long_curve.to_dict())
    assert again == long_curve
    assert again.discriminant() == long_curve.discriminant()


def test_scalar_multiples_hand_values(e5_gf5):
    P = CurvePoint(0, 1)
    assert e5_gf5.mul(2, P) == CurvePoint(0, 4)
    assert e5_gf5.mul(3, P).is_infinity


def test_identity_and_inverse(long_curve):
    for P in long_curve.points():
        assert long_curve.add(P, INF) == P
        assert long_curve.add(P, long_curve.neg(P)).is_infinity
        assert long_curve.sub(P, P).is_infinity


def test_off_curve_point_rejected(e5_gf5):
    with pytest.raises(PointNotOnCurve):
        e5_gf5.point_op(CurvePoint(1, 1), INF, "add")
    with pytest.raises(PointNotOnCurve):
        e5_gf5.point(1, 1)
    assert e5_gf5.point_op(CurvePoint(0, 1), None, "scalar_mul", 3).is_infinity


@pytest.mark.parametrize("name", ["gf5", "gf7", "long"])
def test_enumeration_matches_brute_force(name, e5_gf5, e7, long_curve):
    E = {"gf5": e5_gf5, "gf7": e7, "long": long_curve}[name]
    count, pts = brute_points(E)
    assert E.order == count
    assert sorted((P.x, P.y) for P in E.points() if not P.is_infinity) == sorted(pts)


def test_frozen_point_counts(e5_gf5, e7):
    # frozen from the brute-force sweep above
    assert e5_gf5.order == 6
    assert sorted((P.x, P.y) for P in e5_gf5.points()[1:]) == [(0, 1), (0, 4), (2, 2), (2, 3), (4, 0)]
    assert e7.order == 12


def test_group_structure(e5_gf5, e7):
    gs = e5_gf5.group_structure()
    assert (gs.a, gs.b) == (1, 6)
    gs = e7.group_structure()
    assert (gs.a, gs.b) == (2, 6)
    assert e7.order_of(gs.gen_a) == 2 and e7.order_of(gs.gen_b) == 6


@pytest.mark.parametrize("name", ["found", "long", "gf7"])
def test_exhaustive_associativity(name, found5, long_curve, e7):
    E = {"found": found5.curve, "long": long_curve, "gf7": e7}[name]
    pts = E.points()
    assert len(pts) <= 100
    for P, Q, R in itertools.product(pts, repeat=3):
        assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))


def test_hasse_bound(found5, found5_large, e7, long_curve):
    for E in (found5.curve, found5_large.curve, e7, long_curve):
        assert abs(E.order - E.field.q - 1) <= 2 * math.isqrt(E.field.q) + 1
        assert E.hasse_ok()


def test_two_torsion_basis(e7):
    B = e7.torsion_basis(2)
    two_torsion = {(3, 0), (5, 0), (6, 0)}
    assert {(B.P1.x, B.P1.y), (B.P2.x, B.P2.y)} <= two_torsion
    assert B.P1 != B.P2


def test_torsion_basis_dlog(found5):
    B = found5.basis
    E = found5.curve
    assert len(B.dlog) == 25
    for (i, j) in itertools.product(range(5), repeat=2):
        if (i, j) != (0, 0):
            assert not B.point(i, j).is_infinity
    for P, Q in itertools.product(B.points, repeat=2):
        i1, j1 = B.dlog[P]
        i2, j2 = B.dlog[Q]
        assert B.dlog[E.add(P, Q)] == ((i1 + i2) % 5, (j1 + j2) % 5)
    assert B.dlog[INF] == (0, 0)


def test_torsion_not_rational(e5_gf5):
    with pytest.raises(TorsionNotRational):
        e5_gf5.torsion_basis(5)


def test_torsion_basis_round_trip(found5):
    B = found5.basis
    again = TorsionBasis.from_dict(found5.curve, B.to_dict())
    assert again.dlog == B.dlog


def test_search_m5(found5):
    q = found5.field.q
    assert q <= 250 and q % 5 == 1
    assert found5.curve.order % 25 == 0
    # frozen result of the canonical-order scan, cross-checked by brute force
    assert (q, found5.curve.a) == (31, (0, 0, 0, 0, 11))
    assert brute_points(found5.curve)[0] == 25


def test_search_is_deterministic(found5):
    again = search_curve(m=5, p_range=(5, 250))
    assert again.curve == found5.curve and again.stats == found5.stats
    assert again.basis.to_dict() == found5.basis.to_dict()


def test_search_seed_changes_start():
    a = search_curve(m=5, p_range=(5, 250), seed=7)
    assert a.curve.order % 25 == 0
    assert a.curve == search_curve(m=5, p_range=(5, 250), seed=7).curve


def test_search_m15():
    res = search_curve(m=15, min_points=225, p_range=(5, 2000))
    assert res.field.q % 15 == 1
    gs = res.curve.group_structure()
    assert gs.a % 15 == 0 and gs.b % 15 == 0


def test_search_rejects_even_m():
    with pytest.raises(InvalidParameters):
        search_curve(m=4)


def test_search_failure_carries_stats():
    with pytest.raises(SearchFailed) as info:
        search_curve(m=7, p_range=(5, 20))
    assert "fields_scanned" in info.value.stats


def test_group_contains_mode():
    res = search_curve(m=15, mode=("group_contains", 3, 5), min_points=225, p_range=(5, 2000))
    assert res.basis.m == 15
    with pytest.raises(InvalidParameters):
        search_curve(mode=("group_contains", 3, 9))


def test_random_homomorphism_property(found5_large):
    E = found5_large.curve
    rng = random.Random(0)
    for _ in range(200):
        P, Q = E.random_point(rng), E.random_point(rng)
        n = rng.randrange(1, 400)
        assert E.mul(n, E.add(P, Q)) == E.add(E.mul(n, P), E.mul(n, Q))
