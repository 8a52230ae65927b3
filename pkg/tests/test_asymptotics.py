"""Tests for the length model, its limits, the Cesaro oracle and the scan.

Limit values carried by the bundled model are pinned against the stored
reference constants where the two agree, and against independent sympy
recomputation where they do not.
"""

import random
from fractions import Fraction as F

import pytest
import sympy

from divfilt.asymptotics import (
    REFERENCE_CUBIC_LIMIT,
    REFERENCE_MULTIPLICITY,
    REFERENCE_SIGMA_LIMITS,
    ExampleModel,
    cesaro_consistency,
    empirical_scan,
    example_alpha,
    example_model,
    limit_exists_report,
    model_length,
    multiplicity,
    reference_sigma_limit,
    subsequence_limit,
)
from divfilt.beatty import BeattySequence
from divfilt.intersection import BivariatePolynomial
from divfilt.quadfield import QuadExt

ALPHA = example_alpha()
MODEL = example_model()
Y3 = BivariatePolynomial.monomial(0, 3)


def degenerate_model(c: int = 1) -> ExampleModel:
    return ExampleModel(ALPHA, BivariatePolynomial.monomial(0, 3, c))


# -- model validation -----------------------------------------------------------


def test_model_requires_homogeneous_polys():
    with pytest.raises(ValueError):
        ExampleModel(ALPHA, BivariatePolynomial({(0, 3): F(1), (0, 1): F(1)}))
    with pytest.raises(ValueError):
        ExampleModel(ALPHA, Y3, BivariatePolynomial.monomial(0, 3))
    with pytest.raises(ValueError):
        ExampleModel(QuadExt.sqrt(3), Y3)  # alpha outside (0, 1)


# -- model length ----------------------------------------------------------------


def test_model_length_small_values():
    assert model_length(MODEL, 0) == 0
    assert model_length(MODEL, 1) == F(1, 6) * 198 + F(1, 4) * (-792 + 564 - 175) == F(-271, 4)
    assert model_length(MODEL, 2) == 5  # x = ceil(2a) = 1


def test_model_length_cubic_normalization():
    # length(n)/n^3 approaches p3(alpha,1)/6; at n = 10^5 the gap is O(1/n)
    n = 100_000
    cubic, _ = multiplicity(MODEL)
    ratio = model_length(MODEL, n) / F(n) ** 3
    gap = abs(ratio - F(1, 6) * cubic)
    assert gap < QuadExt.from_rational(F(1, 100), 3)


# -- multiplicity ------------------------------------------------------------------


def test_multiplicity_exact_values():
    cubic, scaled = multiplicity(MODEL)
    assert cubic == QuadExt(F(12042, 169), F(-27, 169), 3)
    assert scaled == QuadExt(F(72252, 169), F(-162, 169), 3)
    assert cubic == REFERENCE_CUBIC_LIMIT
    assert scaled == REFERENCE_MULTIPLICITY
    assert scaled == 6 * cubic


def test_multiplicity_matches_sympy():
    a = sympy.Rational(9, 26) + sympy.sqrt(3) / 26
    expr = sympy.simplify(468 * a**3 - 486 * a**2 + 162 * a + 54)
    want = sympy.nsimplify(sympy.Rational(12042, 169) - sympy.Rational(27, 169) * sympy.sqrt(3))
    assert sympy.simplify(expr - want) == 0


def test_multiplicity_degenerate():
    cubic, scaled = multiplicity(degenerate_model())
    assert cubic == 1 and scaled == 6


# -- subsequence limits ---------------------------------------------------------------


def test_sigma0_limit_reference_value():
    assert subsequence_limit(MODEL, 0) == QuadExt(F(144504, 4056), F(-324, 4056), 3)
    assert subsequence_limit(MODEL, 0) == REFERENCE_SIGMA_LIMITS[0]


def test_sigma1_limit_derived_value():
    # symbolic expansion gives (1/6)(918 a^2 - 648 a + 324)
    a = ALPHA
    want = F(1, 6) * (918 * a**2 - 648 * a + 324)
    assert subsequence_limit(MODEL, 1) == want
    # sympy cross-check of the whole derivation
    x, y, s = sympy.symbols("x y s")
    p3 = 468 * x**3 - 486 * x**2 * y + 162 * x * y**2 + 54 * y**3
    diff = sympy.expand(p3.subs({x: x + 1, y: y + 1}, simultaneous=True) - p3)
    deg2 = sum(
        c * x**i * y**j
        for (i, j), c in sympy.Poly(diff, x, y).terms()
        if i + j == 2
    )
    al = sympy.Rational(9, 26) + sympy.sqrt(3) / 26
    val = sympy.simplify(deg2.subs({x: al, y: 1}) / 6)
    got = subsequence_limit(MODEL, 1)
    want_sym = sympy.Rational(got.a.numerator, got.a.denominator) + sympy.Rational(
        got.b.numerator, got.b.denominator
    ) * sympy.sqrt(3)
    assert sympy.simplify(val - want_sym) == 0


def test_derived_limits_coincide():
    # the difference of the two derived limits is 3*(78a^2 - 54a + 9), and
    # 78a^2 - 54a + 9 = 3*(26a^2 - 18a + 3) = 0
    L0, L1 = subsequence_limit(MODEL, 0), subsequence_limit(MODEL, 1)
    a = ALPHA
    assert L1 - L0 == F(1, 6) * 18 * (78 * a**2 - 54 * a + 9)
    assert 78 * a**2 - 54 * a + 9 == 0
    assert L0 == L1


def test_sigma_limit_degenerate():
    m = ExampleModel(ALPHA, BivariatePolynomial.monomial(0, 3, 54))
    assert subsequence_limit(m, 0) == 27
    assert subsequence_limit(m, 1) == 27


def test_reference_sigma2_value():
    got = reference_sigma_limit(ALPHA, 1)
    assert got == QuadExt(F(106596, 4056), F(-4536, 4056), 3)
    assert got == REFERENCE_SIGMA_LIMITS[1]
    assert got.to_decimal(3) == "24.344"
    assert got != subsequence_limit(MODEL, 1)


# -- Cesaro oracle -----------------------------------------------------------------


def test_cesaro_derived_pair_passes():
    res = cesaro_consistency(MODEL, subsequence_limit(MODEL, 0), subsequence_limit(MODEL, 1))
    assert res.passed
    assert res.rhs == F(1, 2) * REFERENCE_CUBIC_LIMIT


def test_cesaro_reference_pair_fails():
    res = cesaro_consistency(
        MODEL, reference_sigma_limit(ALPHA, 0), reference_sigma_limit(ALPHA, 1)
    )
    assert not res.passed
    assert res.lhs.to_decimal(3) == "30.889"
    assert res.rhs.to_decimal(3) == "35.489"


def test_cesaro_degenerate():
    m = degenerate_model()
    res = cesaro_consistency(m, QuadExt.from_rational(F(1, 2), 3), QuadExt.from_rational(F(1, 2), 3))
    assert res.passed and res.lhs == F(1, 2) and res.rhs == F(1, 2)


def test_cesaro_identity_random_models():
    # (1-a) Q2^0(a,1) + a Q2^1(a,1) = 3 p3(a,1) holds for any homogeneous
    # cubic and any quadratic irrational a in (0,1)
    rng = random.Random(20260811)
    for _ in range(40):
        p3 = BivariatePolynomial(
            {
                (3, 0): F(rng.randint(-30, 30)),
                (2, 1): F(rng.randint(-30, 30)),
                (1, 2): F(rng.randint(-30, 30)),
                (0, 3): F(rng.randint(-30, 30), rng.randint(1, 4)),
            }
        )
        d = rng.choice([2, 3, 5, 7])
        alpha = QuadExt(F(rng.randint(1, 9), 20), F(1, rng.randint(25, 60)), d)
        if not (0 < alpha < 1) or alpha.is_rational():
            continue
        m = ExampleModel(alpha, p3)
        res = cesaro_consistency(m, subsequence_limit(m, 0), subsequence_limit(m, 1))
        assert res.passed, str(alpha)


# -- empirical scan -------------------------------------------------------------------


@pytest.fixture(scope="module")
def scan100k():
    return empirical_scan(
        example_model(), 100_000, sample_stride=1000, checkpoints=(50_000, 100_000)
    )


def test_scan_telescoping(scan100k):
    assert scan100k.telescoping_ok
    small = empirical_scan(MODEL, 10_000, sample_stride=97)
    assert small.telescoping_ok


def test_scan_rows_match_direct_lengths():
    scan = empirical_scan(MODEL, 200, sample_stride=7)
    seq = BeattySequence(ALPHA)
    for row in scan.rows:
        assert row.delta == model_length(MODEL, row.n + 1) - model_length(MODEL, row.n)
        assert row.ratio == row.delta / row.n**2
        assert row.sigma == seq.sigma(row.n)
        assert row.ceil_alpha_n == ALPHA.ceil_scaled(row.n)


def test_scan_sigma_ratios_near_limits(scan100k):
    # near n = 10^5 both classes sit within 1e-3 relative of the derived
    # limit, and far from the reference sigma=1 value
    L = subsequence_limit(MODEL, 0)
    for s in (0, 1):
        st = scan100k.per_sigma[s]
        assert st.last_n > 99_990
        gap = abs(st.last_ratio - L)
        assert gap <= QuadExt.from_rational(F(1, 1000), 3) * L
    ref1 = reference_sigma_limit(ALPHA, 1)
    st1 = scan100k.per_sigma[1]
    assert abs(st1.last_ratio - ref1) > QuadExt.from_rational(F(1, 1000), 3) * ref1


def test_scan_max_ratio_stable(scan100k):
    m1 = scan100k.checkpoint_max[50_000]
    m2 = scan100k.checkpoint_max[100_000]
    assert m2 >= m1
    assert (m2 - m1) / m2 < F(1, 100)
    assert scan100k.max_ratio == m2
    # the global maximum is finite and the bound constant caps every ratio
    c = scan100k.bound_constant
    for s in (0, 1):
        assert scan100k.per_sigma[s].max_ratio < c


def test_scan_max_at_small_n(scan100k):
    # delta(1) = length(2) - length(1) = 5 + 271/4 = 291/4
    assert scan100k.max_ratio == F(291, 4)
    assert scan100k.max_ratio_at == 1


def test_scan_threads_agree():
    a = empirical_scan(MODEL, 5000, sample_stride=13, checkpoints=(2500,), threads=1)
    b = empirical_scan(MODEL, 5000, sample_stride=13, checkpoints=(2500,), threads=4)
    assert a.max_ratio == b.max_ratio and a.max_ratio_at == b.max_ratio_at
    assert a.checkpoint_max == b.checkpoint_max
    assert a.telescoping_ok and b.telescoping_ok
    assert {s: st.to_json() for s, st in a.per_sigma.items()} == {
        s: st.to_json() for s, st in b.per_sigma.items()
    }


def test_scan_monotone_threshold(scan100k):
    # the bundled model's first differences are positive from n = 1 on
    assert scan100k.monotone_from == 1
    # a model with a heavy negative quadratic part dips first; the scan
    # finds the exact index from which lengths never decrease again
    m = ExampleModel(
        ALPHA, Y3, BivariatePolynomial.monomial(0, 2, -100)
    )
    scan = empirical_scan(m, 200)
    n0 = scan.monotone_from
    assert n0 > 1
    assert model_length(m, n0 - 1) > model_length(m, n0)  # still dipping at n0 - 1
    for n in range(n0, 200):
        assert model_length(m, n + 1) >= model_length(m, n)


def test_scan_remainder_slope_bounded(scan100k):
    # |delta(n) - n^2 * L_sigma| grows at most linearly; the sampled
    # estimate is a modest constant for the bundled model
    assert scan100k.estimated_remainder_slope < 100


def test_scan_validation():
    with pytest.raises(ValueError):
        empirical_scan(MODEL, 5)
    with pytest.raises(ValueError):
        empirical_scan(MODEL, 100, sample_stride=0)
    with pytest.raises(ValueError):
        empirical_scan(MODEL, 100, checkpoints=(101,))


# -- assembled report ---------------------------------------------------------------


def test_report_bundled_model():
    rep = limit_exists_report(MODEL)
    assert rep.limit_exists  # derived limits coincide exactly
    assert rep.cesaro_pass
    assert rep.sigma_limits[0] == REFERENCE_SIGMA_LIMITS[0]
    assert rep.sigma_limits[1] != REFERENCE_SIGMA_LIMITS[1]
    slugs = [f.split()[0] for f in rep.audit_flags]
    assert "discrepancy:sigma2-derived-vs-reference" in slugs
    assert "discrepancy:reference-limits-fail-cesaro" in slugs
    assert "note:multiplicity-normalization" in slugs
    assert "discrepancy:sigma1-derived-vs-reference" not in slugs


def test_report_degenerate_model_no_flags():
    rep = limit_exists_report(degenerate_model())
    assert rep.limit_exists
    assert rep.audit_flags == ()
    assert rep.reference_sigma_limits == {}


def test_report_json_shape():
    doc = limit_exists_report(MODEL).to_json(digits=12)
    assert doc["cubic_limit"]["a"] == "12042/169"
    assert doc["cubic_limit"]["b"] == "-27/169"
    assert doc["multiplicity"]["a"] == "72252/169"
    assert doc["limit_exists"] is True
    assert doc["cesaro"]["pass"] is True
    assert len(doc["audit_flags"]) == 4
