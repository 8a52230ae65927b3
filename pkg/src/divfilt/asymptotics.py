"""Multiplicities and first-difference limits of the bundled 3-fold example.

The model length function is the principal part of an exact length formula

    length(n) = (1/6) * p3(ceil(alpha*n), n) + (1/4) * p2(ceil(alpha*n), n)

where p3 is the cubic growth polynomial of the divisor family (expanded
from the intersection table) and p2 its canonical-class pairing; the
dropped remainder is O(n), so it affects neither the n^2-normalized first
differences nor the n^3-normalized multiplicity.

Derived quantities, all exact:

- the cubic growth limit p3(alpha, 1) and the normalized multiplicity
  3! * p3(alpha, 1);
- the first-difference subsequence limits along the two Beatty classes,
  obtained purely by symbolic expansion: the degree-2 part of
  p3(x + sigma, y + 1) - p3(x, y), evaluated at (alpha, 1), times 1/6;
- a Cesaro/telescoping oracle: the sigma classes have densities
  (1 - alpha, alpha) and summing first differences telescopes, so any
  correct pair of limits (L0, L1) satisfies
  (1 - alpha)*L0 + alpha*L1 = p3(alpha, 1)/2 exactly.

The module also stores reference closed forms that the derivation is
audited against.  For the bundled model the audit finds a genuine
discrepancy: the reference sigma=1 form (918a^2 - 810a + 324)/6 differs
from the derived (918a^2 - 648a + 324)/6; the derived pair passes the
Cesaro oracle while the reference pair fails it; and the two derived limits
coincide exactly (their difference is a multiple of the defining relation
26a^2 - 18a + 3 = 0), so at model level the normalized first difference
does converge.  The report raises audit flags instead of silently picking
a side.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, lcm

from divfilt.beatty import scan_threads
from divfilt.intersection import (
    BivariatePolynomial,
    DivisorExpr,
    IntersectionForm,
    POLY_X,
    POLY_Y,
    difference_polynomial,
    triple_product,
)
from divfilt.quadfield import QuadExt, rational_str

__all__ = [
    "ExampleModel",
    "LimitReport",
    "CesaroResult",
    "ScanRow",
    "SigmaStats",
    "ScanResult",
    "example_alpha",
    "example_form",
    "example_model",
    "model_length",
    "multiplicity",
    "subsequence_limit",
    "reference_sigma_limit",
    "cesaro_consistency",
    "empirical_scan",
    "limit_exists_report",
    "REFERENCE_CUBIC_LIMIT",
    "REFERENCE_MULTIPLICITY",
    "REFERENCE_SIGMA_LIMITS",
]

_F = Fraction


def example_alpha() -> QuadExt:
    """alpha = 3/(9 - sqrt(3)) = 9/26 + (1/26) sqrt(3), the ceiling ratio of
    the bundled divisor family."""
    return QuadExt(_F(9, 26), _F(1, 26), 3)


_EXAMPLE_TABLE = {
    ("S", "S", "S"): _F(468),
    ("F", "S", "S"): _F(-162),
    ("F", "F", "S"): _F(54),
    ("F", "F", "F"): _F(54),
    ("K", "S", "S"): _F(-792),
    ("F", "K", "S"): _F(282),
    ("F", "F", "K"): _F(-175),
}


def example_form() -> IntersectionForm:
    """Triple table of the bundled example: lattice generators S, F plus the
    canonical class K (mixed rows only)."""
    return IntersectionForm(("S", "F", "K"), _EXAMPLE_TABLE)


@dataclass(frozen=True)
class ExampleModel:
    """Principal-part length model: alpha plus the two growth polynomials.

    `p3` must be homogeneous of degree 3 and `p2` homogeneous of degree 2
    (either may be zero); alpha must be irrational with 0 < alpha < 1.
    `remainder_slope` is the configurable bound constant for the dropped
    O(n) remainder; the empirical scan estimates one from data.
    """

    alpha: QuadExt
    p3: BivariatePolynomial
    p2: BivariatePolynomial = BivariatePolynomial.zero()
    remainder_slope: Fraction = _F(0)

    def __post_init__(self) -> None:
        if self.alpha.is_rational() or not (0 < self.alpha < 1):
            raise ValueError("alpha must be irrational with 0 < alpha < 1")
        if not self.p3.is_homogeneous(3):
            raise ValueError("p3 must be homogeneous of total degree 3")
        if not self.p2.is_homogeneous(2):
            raise ValueError("p2 must be homogeneous of total degree 2")
        object.__setattr__(self, "remainder_slope", _F(self.remainder_slope))


def example_model(remainder_slope: Fraction | int = 0) -> ExampleModel:
    """The bundled model, with p3/p2 expanded from the intersection table."""
    form = example_form()
    dn = DivisorExpr({"S": POLY_X, "F": POLY_Y})
    k = DivisorExpr.single("K")
    return ExampleModel(
        example_alpha(),
        triple_product(form, dn, dn, dn),
        triple_product(form, dn, dn, k),
        _F(remainder_slope),
    )


# Reference closed forms the derivation is audited against; exact constants.
REFERENCE_CUBIC_LIMIT = QuadExt(_F(12042, 169), _F(-27, 169), 3)
REFERENCE_MULTIPLICITY = QuadExt(_F(72252, 169), _F(-162, 169), 3)
_REFERENCE_SIGMA_QUADRATICS = {
    0: BivariatePolynomial({(2, 0): _F(-486), (1, 1): _F(324), (0, 2): _F(162)}),
    1: BivariatePolynomial({(2, 0): _F(918), (1, 1): _F(-810), (0, 2): _F(324)}),
}
REFERENCE_SIGMA_LIMITS = {
    0: QuadExt(_F(144504, 4056), _F(-324, 4056), 3),
    1: QuadExt(_F(106596, 4056), _F(-4536, 4056), 3),
}


def _as_quad(value, d: int) -> QuadExt:
    return value if isinstance(value, QuadExt) else QuadExt.from_rational(value, d)


def model_length(model: ExampleModel, n: int) -> Fraction:
    """(1/6) p3 + (1/4) p2 at (ceil(alpha*n), n), exact rational."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    return _F(1, 6) * model.p3.evaluate_at_n(model.alpha, n) + _F(1, 4) * model.p2.evaluate_at_n(
        model.alpha, n
    )


def multiplicity(model: ExampleModel) -> tuple[QuadExt, QuadExt]:
    """(cubic growth limit p3(alpha, 1), normalized multiplicity 6*p3(alpha, 1)).

    The two differ by the normalizing factor 3!; both are headline values of
    the reference computation, so both are exposed.
    """
    cubic = _as_quad(model.p3.evaluate(model.alpha, 1), model.alpha.d)
    return cubic, 6 * cubic


def subsequence_limit(model: ExampleModel, sigma: int) -> QuadExt:
    """Limit of delta(n)/n^2 along the Beatty class with ceiling step sigma.

    Purely symbolic: (1/6) * [degree-2 part of p3(x+sigma, y+1) - p3(x, y)]
    evaluated at (alpha, 1).
    """
    if sigma not in (0, 1):
        raise ValueError(f"sigma must be 0 or 1, got {sigma!r}")
    q2 = difference_polynomial(model.p3, sigma).homogeneous_part(2)
    return _F(1, 6) * _as_quad(q2.evaluate(model.alpha, 1), model.alpha.d)


def reference_sigma_limit(alpha: QuadExt, sigma: int) -> QuadExt:
    """Reference closed form for the class-sigma limit (audit target only)."""
    if sigma not in (0, 1):
        raise ValueError(f"sigma must be 0 or 1, got {sigma!r}")
    return _F(1, 6) * _as_quad(_REFERENCE_SIGMA_QUADRATICS[sigma].evaluate(alpha, 1), alpha.d)


@dataclass(frozen=True)
class CesaroResult:
    lhs: QuadExt
    rhs: QuadExt
    passed: bool

    def to_json(self, digits: int = 30) -> dict:
        return {
            "lhs": self.lhs.to_json(digits),
            "rhs": self.rhs.to_json(digits),
            "pass": self.passed,
        }


def cesaro_consistency(model: ExampleModel, L0: QuadExt, L1: QuadExt) -> CesaroResult:
    """Check (1 - alpha)*L0 + alpha*L1 = p3(alpha, 1)/2, exactly.

    Any correct pair of n^2-normalized first-difference limits along the two
    Beatty classes must satisfy this: the classes have densities
    (1 - alpha, alpha), the first differences telescope to the model length,
    and sum of n^2 over [1, N) grows like N^3/3 against the length's
    p3(alpha, 1)/6 times N^3.
    """
    alpha = model.alpha
    lhs = (1 - alpha) * _as_quad(L0, alpha.d) + alpha * _as_quad(L1, alpha.d)
    cubic, _ = multiplicity(model)
    rhs = _F(1, 2) * cubic
    return CesaroResult(lhs, rhs, lhs == rhs)


# -- empirical scan ----------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    n: int
    sigma: int
    ceil_alpha_n: int
    delta: Fraction
    ratio: Fraction  # delta / n^2

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "sigma": self.sigma,
            "ceil_alpha_n": self.ceil_alpha_n,
            "delta": rational_str(self.delta),
            "ratio": rational_str(self.ratio),
        }


@dataclass
class SigmaStats:
    """Running extremes of delta(n)/n^2 within one sigma class."""

    count: int = 0
    min_ratio: Fraction | None = None
    min_at: int | None = None
    max_ratio: Fraction | None = None
    max_at: int | None = None
    last_n: int | None = None
    last_ratio: Fraction | None = None

    def to_json(self) -> dict:
        def rs(v):
            return rational_str(v) if v is not None else None

        return {
            "count": self.count,
            "min_ratio": rs(self.min_ratio),
            "min_at": self.min_at,
            "max_ratio": rs(self.max_ratio),
            "max_at": self.max_at,
            "last_n": self.last_n,
            "last_ratio": rs(self.last_ratio),
        }


@dataclass(frozen=True)
class ScanResult:
    """Exact scan summary over [1, n_max]; rows sampled by stride.

    `monotone_from` is the smallest scanned index from which the model
    length never decreases again (the true lengths are nondecreasing; the
    model may dip at small n where the dropped O(n) remainder dominates).
    """

    n_max: int
    stride: int
    rows: tuple[ScanRow, ...]
    per_sigma: dict
    max_ratio: Fraction
    max_ratio_at: int
    bound_constant: int
    telescoping_ok: bool
    monotone_from: int
    checkpoint_max: dict
    estimated_remainder_slope: QuadExt

    def to_json(self, digits: int = 30) -> dict:
        return {
            "n_max": self.n_max,
            "stride": self.stride,
            "per_sigma": {str(k): v.to_json() for k, v in sorted(self.per_sigma.items())},
            "max_ratio": rational_str(self.max_ratio),
            "max_ratio_at": self.max_ratio_at,
            "bound_constant": self.bound_constant,
            "telescoping_ok": self.telescoping_ok,
            "monotone_from": self.monotone_from,
            "checkpoint_max": {
                str(k): rational_str(v) for k, v in sorted(self.checkpoint_max.items())
            },
            "estimated_remainder_slope": self.estimated_remainder_slope.to_json(digits),
        }


@dataclass
class _ScanChunk:
    start: int
    stop: int
    rows: list
    stats: dict
    max_num: int | None
    max_at: int | None
    delta_sum: int
    last_negative: int | None


def _int_model(model: ExampleModel) -> tuple[list[tuple[int, int, int]], int]:
    """Scaled integer form: model_length(n) = N(x, n) / D with N integral."""
    combined = 2 * model.p3 + 3 * model.p2  # = 12 * model_length before scaling
    denom = 1
    for c in combined.terms.values():
        denom = lcm(denom, c.denominator)
    terms = [(i, j, int(c * denom)) for (i, j), c in sorted(combined.terms.items())]
    return terms, 12 * denom


def _eval_int(terms: list[tuple[int, int, int]], x: int, n: int) -> int:
    acc = 0
    for i, j, c in terms:
        acc += c * x**i * n**j
    return acc


def _ceil_kernel(alpha: QuadExt):
    """Return f(n) = ceil(alpha*n) as a pure-integer closure (alpha irrational)."""
    A, B, q = alpha._cleared()
    dbb = B * B * alpha.d
    neg = B < 0

    def ceil_n(n: int) -> int:
        if n == 0:
            return 0
        s = isqrt(dbb * n * n)
        fb = -s - 1 if neg else s
        return (A * n + fb) // q + 1  # alpha*n irrational for n >= 1

    return ceil_n


def _scan_range(terms, denom, ceil_n, start, stop, stride) -> _ScanChunk:
    """Scan n in [start, stop] inclusive; integers only in the hot loop."""
    rows: list[ScanRow] = []
    stats: dict[int, SigmaStats] = {0: SigmaStats(), 1: SigmaStats()}
    max_num = None
    max_at = None
    delta_sum = 0
    last_negative = None
    x = ceil_n(start)
    value = _eval_int(terms, x, start)
    for n in range(start, stop + 1):
        x_next = ceil_n(n + 1)
        value_next = _eval_int(terms, x_next, n + 1)
        dnum = value_next - value
        s = x_next - x
        nn = n * n
        st = stats[s]
        st.count += 1
        if st.min_ratio is None:
            ratio = _F(dnum, denom * nn)
            st.min_ratio = st.max_ratio = ratio
            st.min_at = st.max_at = n
        else:
            # cross-multiplied comparisons keep the loop in plain integers
            if dnum * st.min_ratio.denominator < st.min_ratio.numerator * denom * nn:
                st.min_ratio, st.min_at = _F(dnum, denom * nn), n
            if dnum * st.max_ratio.denominator > st.max_ratio.numerator * denom * nn:
                st.max_ratio, st.max_at = _F(dnum, denom * nn), n
        st.last_n, st.last_ratio = n, _F(dnum, denom * nn)
        if max_num is None or dnum * max_at * max_at > max_num * nn:
            max_num, max_at = dnum, n
        if dnum < 0:
            last_negative = n
        delta_sum += dnum
        if (n - start) % stride == 0 or n == stop:
            rows.append(ScanRow(n, s, x, _F(dnum, denom), _F(dnum, denom * nn)))
        x, value = x_next, value_next
    return _ScanChunk(start, stop, rows, stats, max_num, max_at, delta_sum, last_negative)


def _merge_stats(acc: SigmaStats, part: SigmaStats) -> None:
    if part.count == 0:
        return
    acc.count += part.count
    if acc.min_ratio is None or (part.min_ratio is not None and part.min_ratio < acc.min_ratio):
        acc.min_ratio, acc.min_at = part.min_ratio, part.min_at
    if acc.max_ratio is None or (part.max_ratio is not None and part.max_ratio > acc.max_ratio):
        acc.max_ratio, acc.max_at = part.max_ratio, part.max_at
    acc.last_n, acc.last_ratio = part.last_n, part.last_ratio


def empirical_scan(
    model: ExampleModel,
    n_max: int,
    sample_stride: int = 1,
    checkpoints: tuple[int, ...] = (),
    threads: int | None = None,
) -> ScanResult:
    """Exact scan of the first differences delta(n) = length(n+1) - length(n).

    Rows are sampled every `sample_stride` indices; the per-sigma extremes,
    the global maximum of delta(n)/n^2, the telescoping identity and the
    remainder-slope estimate cover every n in [1, n_max].  `checkpoints`
    records the running maximum of delta(n)/n^2 at the given indices.
    The index range splits into chunks merged in order, so the scan can run
    on a thread pool (DIVFILT_THREADS) without changing any output.
    """
    if not isinstance(n_max, int) or n_max < 10:
        raise ValueError(f"n_max must be an integer >= 10, got {n_max!r}")
    if not isinstance(sample_stride, int) or sample_stride < 1:
        raise ValueError(f"sample_stride must be a positive integer, got {sample_stride!r}")
    for c in checkpoints:
        if not isinstance(c, int) or not 1 <= c <= n_max:
            raise ValueError(f"checkpoint {c!r} outside [1, {n_max}]")

    terms, denom = _int_model(model)
    ceil_n = _ceil_kernel(model.alpha)
    limits = {s: subsequence_limit(model, s) for s in (0, 1)}

    # chunk boundaries: checkpoints first (so running maxima are exact at
    # them), then even splits for the worker pool
    workers = scan_threads(threads)
    ranges: list[tuple[int, int]] = []
    prev = 1
    for b in sorted({n_max, *checkpoints}):
        span = b - prev + 1
        parts = min(workers, span) if workers > 1 else 1
        step = (span + parts - 1) // parts
        lo = prev
        while lo <= b:
            hi = min(lo + step - 1, b)
            ranges.append((lo, hi))
            lo = hi + 1
        prev = b + 1

    def job(r):
        return _scan_range(terms, denom, ceil_n, r[0], r[1], sample_stride)

    if workers == 1 or len(ranges) == 1:
        chunks = [job(r) for r in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(job, ranges))

    checkpoint_set = set(checkpoints)
    rows: list[ScanRow] = []
    stats = {0: SigmaStats(), 1: SigmaStats()}
    max_ratio: Fraction | None = None
    max_at: int | None = None
    checkpoint_max: dict[int, Fraction] = {}
    total = 0
    last_negative = None
    for chunk in chunks:
        rows.extend(chunk.rows)
        for s, st in chunk.stats.items():
            _merge_stats(stats[s], st)
        if chunk.max_num is not None:
            r = _F(chunk.max_num, denom * chunk.max_at * chunk.max_at)
            if max_ratio is None or r > max_ratio:
                max_ratio, max_at = r, chunk.max_at
        total += chunk.delta_sum
        if chunk.last_negative is not None:
            last_negative = chunk.last_negative
        if chunk.stop in checkpoint_set:
            assert max_ratio is not None
            checkpoint_max[chunk.stop] = max_ratio
    assert max_ratio is not None and max_at is not None

    # telescoping: sum_{n=1}^{n_max} delta(n) = length(n_max+1) - length(1)
    telescoping_ok = _F(total, denom) == model_length(model, n_max + 1) - model_length(model, 1)

    # remainder-slope estimate |delta(n) - n^2 L_sigma(n)| / n on a sparse
    # exact sample (QuadExt arithmetic is too heavy for every index)
    slope = QuadExt.from_rational(0, model.alpha.d)
    sample_step = max(1, n_max // 512)
    for n in list(range(1, n_max + 1, sample_step)) + [n_max]:
        xs, xn = ceil_n(n), ceil_n(n + 1)
        dnum = _eval_int(terms, xn, n + 1) - _eval_int(terms, xs, n)
        dev = abs(_F(dnum, denom) - (n * n) * limits[xn - xs]) / n
        if dev > slope:
            slope = dev

    return ScanResult(
        n_max=n_max,
        stride=sample_stride,
        rows=tuple(rows),
        per_sigma=stats,
        max_ratio=max_ratio,
        max_ratio_at=max_at,
        bound_constant=math.ceil(max_ratio) + 1,
        telescoping_ok=telescoping_ok,
        monotone_from=(last_negative + 1) if last_negative is not None else 1,
        checkpoint_max=checkpoint_max,
        estimated_remainder_slope=slope,
    )


# -- assembled report ---------------------------------------------------------


@dataclass(frozen=True)
class LimitReport:
    alpha: QuadExt
    cubic_limit: QuadExt
    multiplicity: QuadExt
    sigma_limits: dict
    reference_sigma_limits: dict
    cesaro_lhs: QuadExt
    cesaro_rhs: QuadExt
    cesaro_pass: bool
    limit_exists: bool
    audit_flags: tuple[str, ...]

    def __post_init__(self) -> None:
        assert self.limit_exists == (self.sigma_limits[0] == self.sigma_limits[1])

    def to_json(self, digits: int = 30) -> dict:
        return {
            "alpha": self.alpha.to_json(digits),
            "cubic_limit": self.cubic_limit.to_json(digits),
            "multiplicity": self.multiplicity.to_json(digits),
            "sigma_limits": {
                str(k): v.to_json(digits) for k, v in sorted(self.sigma_limits.items())
            },
            "reference_sigma_limits": {
                str(k): v.to_json(digits) for k, v in sorted(self.reference_sigma_limits.items())
            },
            "cesaro": {
                "lhs": self.cesaro_lhs.to_json(digits),
                "rhs": self.cesaro_rhs.to_json(digits),
                "pass": self.cesaro_pass,
            },
            "limit_exists": self.limit_exists,
            "audit_flags": list(self.audit_flags),
        }


def _is_bundled(model: ExampleModel) -> bool:
    bundled = example_model()
    return model.alpha == bundled.alpha and model.p3 == bundled.p3


def limit_exists_report(model: ExampleModel) -> LimitReport:
    """Assemble limits, oracle verdicts and audit flags for a model.

    `limit_exists` is decided by exact equality of the two derived
    subsequence limits, never by decimal comparison.  Reference-value audits
    apply only to the bundled model (the reference closed forms belong to
    it); flag prefix ``discrepancy:`` marks an exact mismatch, ``note:``
    marks an informational cross-check.
    """
    cubic, scaled = multiplicity(model)
    L0 = subsequence_limit(model, 0)
    L1 = subsequence_limit(model, 1)
    cesaro = cesaro_consistency(model, L0, L1)
    flags: list[str] = []
    ref_limits: dict[int, QuadExt] = {}
    if _is_bundled(model):
        ref_limits = {s: reference_sigma_limit(model.alpha, s) for s in (0, 1)}
        if L0 != ref_limits[0]:
            flags.append("discrepancy:sigma1-derived-vs-reference")
        if L1 != ref_limits[1]:
            flags.append(
                "discrepancy:sigma2-derived-vs-reference "
                f"derived={L1.to_decimal(6)} reference={ref_limits[1].to_decimal(6)}"
            )
        ref_cesaro = cesaro_consistency(model, ref_limits[0], ref_limits[1])
        if not ref_cesaro.passed:
            flags.append(
                "discrepancy:reference-limits-fail-cesaro "
                f"lhs={ref_cesaro.lhs.to_decimal(6)} rhs={ref_cesaro.rhs.to_decimal(6)}"
            )
        if cubic == REFERENCE_CUBIC_LIMIT and scaled == REFERENCE_MULTIPLICITY:
            flags.append(
                "note:multiplicity-normalization "
                "the reference multiplicity equals 3! times the cubic growth limit"
            )
        flags.append(
            "note:canonical-table-alternate-constant "
            "the n^2 coefficient of the canonical pairing is ingested as -175; "
            "an alternate reference display reads -174/4"
        )
    return LimitReport(
        alpha=model.alpha,
        cubic_limit=cubic,
        multiplicity=scaled,
        sigma_limits={0: L0, 1: L1},
        reference_sigma_limits=ref_limits,
        cesaro_lhs=cesaro.lhs,
        cesaro_rhs=cesaro.rhs,
        cesaro_pass=cesaro.passed,
        limit_exists=(L0 == L1),
        audit_flags=tuple(flags),
    )
