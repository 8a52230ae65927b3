"""Tests for the elliptic group law, the q_n sequence and the restriction
bookkeeping.  Hand-derived doubling values and torsion counterexamples act
as oracles; group axioms are spot-checked on random multiples."""

import random
from fractions import Fraction as F

import pytest

from divfilt.picard import (
    O,
    CurvePoint,
    DivisorClass,
    EllipticCurve,
    PointNotOnCurveError,
    SingularCurveError,
    add_points,
    class_of,
    curve_from_json,
    curve_to_json,
    default_curve,
    infinite_order_witness,
    qn_sequence,
    restriction_class,
    restriction_report,
    scalar_mul,
)

E, P0, Q0 = default_curve()  # y^2 = x^3 - 2, p = O, q = (3, 5)
DOUBLE_Q = CurvePoint(F(129, 100), F(-383, 1000))  # tangent slope 27/10, by hand


def test_singular_curve_rejected():
    with pytest.raises(SingularCurveError):
        EllipticCurve(F(0), F(0))
    with pytest.raises(SingularCurveError):
        EllipticCurve(F(-3), F(2))  # 4*(-27) + 27*4 = 0


def test_points_validated():
    with pytest.raises(PointNotOnCurveError):
        add_points(E, CurvePoint(F(1), F(1)), Q0)
    assert E.contains(O)


def test_identity_and_inverse():
    assert add_points(E, Q0, O) == Q0
    assert add_points(E, O, Q0) == Q0
    assert add_points(E, Q0, E.neg(Q0)) == O


def test_doubling_by_hand():
    assert add_points(E, Q0, Q0) == DOUBLE_Q
    assert scalar_mul(E, 2, Q0) == DOUBLE_Q


def test_scalar_mul_basics():
    assert scalar_mul(E, 0, Q0) == O
    assert scalar_mul(E, 1, Q0) == Q0
    assert scalar_mul(E, -1, Q0) == E.neg(Q0)
    assert scalar_mul(E, 5, Q0) == E.add(
        scalar_mul(E, 2, Q0), scalar_mul(E, 3, Q0)
    )


def test_group_axioms_spot_checks():
    rng = random.Random(11)
    pts = [scalar_mul(E, k, Q0) for k in range(-6, 7)]
    for _ in range(60):
        A, B, C = (rng.choice(pts) for _ in range(3))
        assert E.add(E.add(A, B), C) == E.add(A, E.add(B, C))
        assert E.add(A, B) == E.add(B, A)
        assert E.add(A, E.neg(A)) == O


def test_scalar_mul_homomorphism():
    rng = random.Random(22)
    for _ in range(30):
        m, n = rng.randint(-8, 8), rng.randint(-8, 8)
        assert E.add(scalar_mul(E, m, Q0), scalar_mul(E, n, Q0)) == scalar_mul(E, m + n, Q0)


def test_finite_field_curve():
    Ep = EllipticCurve(2, 3, 97)
    pt = None
    for x in range(97):
        rhs = (x**3 + 2 * x + 3) % 97
        for y in range(97):
            if y * y % 97 == rhs:
                pt = CurvePoint(x, y)
                break
        if pt:
            break
    assert pt is not None and Ep.contains(pt)
    # Lagrange: the point's order divides the group order; brute-force it
    order = 1
    acc = pt
    while not acc.is_infinity:
        acc = Ep.add(acc, pt)
        order += 1
    assert Ep.mul(order, pt).is_infinity
    with pytest.raises(ValueError):
        EllipticCurve(1, 1, 15)  # not prime


# -- divisor classes -----------------------------------------------------------


def test_class_of_empty_and_cancellation():
    assert class_of(E, []) == DivisorClass(0, O)
    assert class_of(E, [(Q0, 1), (Q0, -1)]) == DivisorClass(0, O)


def test_class_of_homomorphism():
    rng = random.Random(33)
    pts = [scalar_mul(E, k, Q0) for k in range(1, 6)]
    for _ in range(20):
        d1 = [(rng.choice(pts), rng.randint(-3, 3)) for _ in range(3)]
        d2 = [(rng.choice(pts), rng.randint(-3, 3)) for _ in range(2)]
        c1, c2, c12 = class_of(E, d1), class_of(E, d2), class_of(E, d1 + d2)
        assert c12.degree == c1.degree + c2.degree
        assert c12.point == E.add(c1.point, c2.point)


def test_class_of_qn_shape():
    for n in (1, 2, 7):
        got = class_of(E, [(Q0, n), (P0, 1 - n)])
        assert got.degree == 1
        assert got.point == scalar_mul(E, n, Q0)  # p = O here


# -- q_n sequence ------------------------------------------------------------------


def test_qn_first_values():
    rep = qn_sequence(E, P0, Q0, 2)
    assert rep.points[0] == Q0
    assert rep.points[1] == DOUBLE_Q


def test_qn_distinct_to_200():
    rep = qn_sequence(E, P0, Q0, 200)
    assert rep.all_distinct
    # q_1 = q is definitional; the sequence must never return to q
    assert rep.q_hits == (1,)
    assert rep.avoids_q


def test_qn_matches_generic_group_law():
    # the integer-triple kernel must agree with plain Fraction arithmetic
    rep = qn_sequence(E, P0, Q0, 25)
    for n, pt in enumerate(rep.points, start=1):
        assert pt == scalar_mul(E, n, Q0)  # p = O here


def test_qn_avoids_q_with_affine_p():
    # with p = [2]q the sequence p + n(q - p) never returns to q after n = 1
    p = scalar_mul(E, 2, Q0)
    rep = qn_sequence(E, p, Q0, 120)
    assert rep.all_distinct
    assert rep.q_hits == (1,)
    assert rep.avoids_q


def test_qn_kernel_without_gmpy2(monkeypatch):
    # the kernel must give identical results on pure stdlib integers
    import math

    import divfilt.picard as picard

    monkeypatch.setattr(picard, "_mpz", int)
    monkeypatch.setattr(picard, "_gcd", math.gcd)
    monkeypatch.setattr(picard, "_isqrt", math.isqrt)
    rep = qn_sequence(E, P0, Q0, 30)
    for n, pt in enumerate(rep.points, start=1):
        assert pt == scalar_mul(E, n, Q0)
    assert rep.all_distinct


def test_qn_non_integral_model_falls_back():
    # quarter-integer coefficients force the generic Fraction path
    Ew = EllipticCurve(F(-1, 4), F(0))
    t = CurvePoint(F(1, 2), F(0))  # 2-torsion: y = 0
    rep = qn_sequence(Ew, O, t, 6)
    assert not rep.all_distinct and rep.collisions_certified


def test_qn_torsion_collision_detected():
    # y^2 = x^3 - x has the 2-torsion point (0, 0)
    Et = EllipticCurve(F(-1), F(0))
    t = CurvePoint(F(0), F(0))
    rep = qn_sequence(Et, O, t, 10)
    assert not rep.all_distinct
    assert rep.collisions  # q_{n+2} = q_n throughout
    assert rep.collisions_certified  # every collision re-verified as torsion
    assert rep.collisions[0] == (1, 3)


def test_qn_rejects_equal_base_points():
    with pytest.raises(ValueError):
        qn_sequence(E, Q0, Q0, 5)


# -- infinite order witness ----------------------------------------------------------


def test_witness_identity_fails_immediately():
    v = infinite_order_witness(E, O, 12)
    assert not v.passed and v.failed_at == 1


def test_witness_certifies_non_torsion():
    v = infinite_order_witness(E, Q0, 12)
    assert v.passed and v.certified_infinite and not v.bounded_only


def test_witness_low_bound_not_certifying():
    v = infinite_order_witness(E, Q0, 5)
    assert v.passed and not v.certified_infinite


def test_witness_two_torsion():
    Et = EllipticCurve(F(-1), F(0))
    v = infinite_order_witness(Et, CurvePoint(F(0), F(0)), 12)
    assert not v.passed and v.failed_at == 2


def test_witness_finite_field_bounded_only():
    Ep = EllipticCurve(2, 3, 97)
    pt = CurvePoint(0, 10)  # 10^2 = 100 = 3 mod 97
    assert Ep.contains(pt)
    v = infinite_order_witness(Ep, pt, 12)
    assert v.bounded_only and not v.certified_infinite


# -- restriction bookkeeping -----------------------------------------------------------


def test_restriction_trivial_to_50():
    for n in range(1, 51):
        assert restriction_class(E, P0, Q0, n).is_trivial


def test_restriction_trivial_affine_p():
    p = scalar_mul(E, 3, Q0)
    for n in (1, 2, 5, 17):
        assert restriction_class(E, p, Q0, n).is_trivial


def test_restriction_n1_trivial():
    assert restriction_class(E, P0, Q0, 1) == DivisorClass(0, O)


def test_restriction_perturbed_ledger_flagged():
    got = restriction_class(E, P0, Q0, 7, drop_exceptional_term=True)
    assert got.degree == 1
    assert not got.is_trivial


def test_restriction_report_coherence():
    rep = restriction_report(E, P0, Q0, 13)
    assert rep.trivial
    assert rep.abel_jacobi_consistent
    assert rep.exceptional_rules_coherent
    assert rep.qn == scalar_mul(E, 13, Q0)


# -- JSON ---------------------------------------------------------------------------


def test_curve_json_roundtrip():
    doc = {
        "field": "Q",
        "A": "0",
        "B": "-2",
        "points": {"p": "O", "q": {"x": "3", "y": "5"}},
    }
    curve, pts = curve_from_json(doc)
    assert curve == E
    assert pts["p"] == O and pts["q"] == Q0
    assert curve_to_json(curve, pts) == doc


def test_curve_json_finite_field():
    doc = {"field": {"p": 97}, "A": "2", "B": "3", "points": {"q": {"x": "0", "y": "10"}}}
    curve, pts = curve_from_json(doc)
    assert curve.p == 97 and pts["q"] == CurvePoint(0, 10)


def test_curve_json_validation():
    with pytest.raises(ValueError):
        curve_from_json({"field": "R", "A": "0", "B": "-2"})
    with pytest.raises(ValueError):
        curve_from_json({"field": "Q", "A": "0"})
    with pytest.raises(PointNotOnCurveError):
        curve_from_json(
            {"field": "Q", "A": "0", "B": "-2", "points": {"q": {"x": "1", "y": "1"}}}
        )
