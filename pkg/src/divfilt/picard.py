"""Elliptic-curve group law and divisor-class bookkeeping, exactly.

Curves are short Weierstrass y^2 = x^3 + A x + B over the rationals
(Fraction coordinates) or over a prime field F_p with p an odd prime.
The chord-tangent group law realizes the Jacobian: a degree-d divisor
class is represented by the pair (d, P) where P is the group-law sum of
its points with multiplicities (Abel-Jacobi).

On top of the group law the module generates the point sequence

    q_n = p + [n](q - p),

audits its pairwise distinctness and q-avoidance (collisions certify a
torsion relation, which is re-verified on the spot), certifies infinite
order over Q via the bounded multiple check against the uniform rational
torsion bound 12 (a general number-theoretic fact, used as a design
choice; over F_p the verdict is only a bounded check), and replays the
blowup restriction bookkeeping whose assembled divisor class

    n(q - p) + p - q_n

must be trivial; the hard-coded exceptional pairing rules feeding that
replay (the self-intersection of the contracted section is the class of
-p, and after blowing up q_n it becomes the class of -p - q_n while the
exceptional curve meets the strict transform in q_n) are checked for
group-law coherence alongside.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable

from divfilt.quadfield import parse_rational, rational_str

try:  # GMP-backed integers make the O(n^2)-digit heights tractable
    from gmpy2 import gcd as _gcd, isqrt as _isqrt, mpz as _mpz
except ImportError:  # pragma: no cover - fallback exercised via monkeypatch
    from math import gcd as _gcd, isqrt as _isqrt

    _mpz = int


def _coprime_fraction(num: int, den: int) -> Fraction:
    """Fraction from an already-reduced pair (den > 0, gcd = 1); skips the
    constructor's redundant normalization gcd."""
    f = Fraction.__new__(Fraction)
    f._numerator = num
    f._denominator = den
    return f

__all__ = [
    "EllipticCurve",
    "CurvePoint",
    "DivisorClass",
    "SingularCurveError",
    "PointNotOnCurveError",
    "add_points",
    "scalar_mul",
    "class_of",
    "qn_sequence",
    "QnReport",
    "infinite_order_witness",
    "WitnessVerdict",
    "restriction_class",
    "restriction_report",
    "RestrictionReport",
    "RATIONAL_TORSION_BOUND",
    "curve_from_json",
    "curve_to_json",
]

#: Over Q, a torsion point has order at most 12; checking multiples up to
#: this bound therefore certifies infinite order.
RATIONAL_TORSION_BOUND = 12


class SingularCurveError(ValueError):
    """4A^3 + 27B^2 = 0: the Weierstrass cubic is singular."""


class PointNotOnCurveError(ValueError):
    """A point's coordinates do not satisfy the curve equation."""


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    # deterministic witness set for n < 3.3 * 10^24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y) or the point at infinity (both coordinates None)."""

    x: object = None
    y: object = None

    def __post_init__(self) -> None:
        if (self.x is None) != (self.y is None):
            raise ValueError("both coordinates or neither")

    @classmethod
    def infinity(cls) -> CurvePoint:
        return cls(None, None)

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self) -> str:
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"

    def to_json(self) -> object:
        if self.is_infinity:
            return "O"
        return {"x": _coord_str(self.x), "y": _coord_str(self.y)}


def _coord_str(c) -> str:
    return rational_str(c) if isinstance(c, Fraction) else str(c)


O = CurvePoint.infinity()


@dataclass(frozen=True)
class EllipticCurve:
    """y^2 = x^3 + A x + B over Q (p None) or over F_p (p an odd prime)."""

    a: object
    b: object
    p: int | None = None

    def __post_init__(self) -> None:
        if self.p is not None:
            if not isinstance(self.p, int) or self.p == 2 or not _is_probable_prime(self.p):
                raise ValueError(f"field modulus must be an odd prime, got {self.p!r}")
            object.__setattr__(self, "a", int(self.a) % self.p)
            object.__setattr__(self, "b", int(self.b) % self.p)
        else:
            object.__setattr__(self, "a", Fraction(self.a))
            object.__setattr__(self, "b", Fraction(self.b))
        disc = 4 * self.a**3 + 27 * self.b**2
        if self._norm(disc) == 0:
            raise SingularCurveError(f"4A^3 + 27B^2 = 0 for A={self.a}, B={self.b}")

    # field helpers -----------------------------------------------------------

    def _norm(self, v):
        return v % self.p if self.p is not None else v

    def _div(self, u, v):
        if self.p is not None:
            return u * pow(v, -1, self.p) % self.p
        return Fraction(u) / v

    def coord(self, raw) -> object:
        """Coerce an ingested coordinate into this curve's field."""
        if self.p is not None:
            return int(raw) % self.p
        return Fraction(raw)

    def contains(self, pt: CurvePoint) -> bool:
        if pt.is_infinity:
            return True
        lhs = self._norm(pt.y * pt.y)
        rhs = self._norm(pt.x**3 + self.a * pt.x + self.b)
        return lhs == rhs

    def check(self, pt: CurvePoint) -> CurvePoint:
        if not self.contains(pt):
            raise PointNotOnCurveError(f"{pt} is not on {self}")
        return pt

    # group law ----------------------------------------------------------------

    def neg(self, pt: CurvePoint) -> CurvePoint:
        if pt.is_infinity:
            return pt
        return CurvePoint(pt.x, self._norm(-pt.y))

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        if P.x == Q.x:
            if self._norm(P.y + Q.y) == 0:
                return O  # P = -Q, includes the 2-torsion case y = 0
            lam = self._div(3 * P.x * P.x + self.a, 2 * P.y)
        else:
            lam = self._div(Q.y - P.y, Q.x - P.x)
        x3 = self._norm(lam * lam - P.x - Q.x)
        y3 = self._norm(lam * (P.x - x3) - P.y)
        return CurvePoint(x3, y3)

    def sub(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        return self.add(P, self.neg(Q))

    def mul(self, k: int, P: CurvePoint) -> CurvePoint:
        if not isinstance(k, int):
            raise TypeError("scalar must be an integer")
        if k < 0:
            return self.mul(-k, self.neg(P))
        acc = O
        addend = P
        while k:
            if k & 1:
                acc = self.add(acc, addend)
            addend = self.add(addend, addend)
            k >>= 1
        return acc

    def __str__(self) -> str:
        field = "Q" if self.p is None else f"F_{self.p}"
        return f"y^2 = x^3 + {self.a}*x + {self.b} over {field}"


def add_points(E: EllipticCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    return E.add(E.check(P), E.check(Q))


def scalar_mul(E: EllipticCurve, k: int, P: CurvePoint) -> CurvePoint:
    return E.mul(k, E.check(P))


@dataclass(frozen=True)
class DivisorClass:
    """Degree plus Abel-Jacobi point: the class of sum(m_i P_i) is
    (sum m_i, group-law sum of [m_i]P_i)."""

    degree: int
    point: CurvePoint

    @property
    def is_trivial(self) -> bool:
        return self.degree == 0 and self.point.is_infinity

    def to_json(self) -> dict:
        return {"degree": self.degree, "point": self.point.to_json()}


def class_of(E: EllipticCurve, divisor: Iterable[tuple[CurvePoint, int]]) -> DivisorClass:
    """Divisor class of a formal sum of (point, multiplicity) pairs.

    Two divisors are linearly equivalent iff their classes are equal.
    """
    degree = 0
    acc = O
    for pt, mult in divisor:
        E.check(pt)
        degree += mult
        acc = E.add(acc, E.mul(mult, pt))
    return DivisorClass(degree, acc)


def class_add(E: EllipticCurve, c1: DivisorClass, c2: DivisorClass) -> DivisorClass:
    return DivisorClass(c1.degree + c2.degree, E.add(c1.point, c2.point))


def class_sub(E: EllipticCurve, c1: DivisorClass, c2: DivisorClass) -> DivisorClass:
    return DivisorClass(c1.degree - c2.degree, E.sub(c1.point, c2.point))


# -- the q_n sequence -----------------------------------------------------------


class _IntegralKernel:
    """Fast chord-tangent steps on y^2 = x^3 + Ax + B with integer A, B.

    Rational points on an integral model have x = a/e^2, y = b/e^3 in lowest
    terms; tracking the integer triple (a, b, e) lets one addition run on
    plain integers with a single normalization (two gcds) at the end,
    instead of a gcd per Fraction operation.  Heights of the q_n grow
    quadratically, so this dominates the sequence scan cost.
    """

    def __init__(self, curve: EllipticCurve):
        assert curve.p is None and curve.a.denominator == 1 and curve.b.denominator == 1
        self.A = _mpz(curve.a.numerator)

    @staticmethod
    def from_point(pt: CurvePoint):
        if pt.is_infinity:
            return None
        x, y = Fraction(pt.x), Fraction(pt.y)
        e = isqrt(x.denominator)
        if e * e != x.denominator or y.denominator != e**3:
            raise PointNotOnCurveError(f"{pt} is not on an integral model")
        return (_mpz(x.numerator), _mpz(y.numerator), _mpz(e))

    @staticmethod
    def to_point(t) -> CurvePoint:
        if t is None:
            return O
        a, b, e = t
        return CurvePoint(
            _coprime_fraction(int(a), int(e * e)), _coprime_fraction(int(b), int(e**3))
        )

    @staticmethod
    def _normalize(xn, yn, z):
        if z < 0:  # keep denominators positive: x is even in z, y is odd
            z, yn = -z, -yn
        zsq = z * z
        g = _gcd(xn, zsq)
        a, dx = xn // g, zsq // g
        zcb = zsq * z
        g = _gcd(yn, zcb)
        b, dy = yn // g, zcb // g
        e = _isqrt(dx)
        assert e * e == dx and dy == e**3
        return (a, b, e)

    def double(self, t):
        if t is None:
            return None
        a, b, e = t
        if b == 0:
            return None
        m = 3 * a * a + self.A * e**4
        s = 4 * a * b * b
        xn = m * m - 2 * s
        yn = m * (s - xn) - 8 * b**4
        return self._normalize(xn, yn, 2 * b * e)

    def add(self, t1, t2):
        if t1 is None:
            return t2
        if t2 is None:
            return t1
        a1, b1, e1 = t1
        a2, b2, e2 = t2
        u1, u2 = a1 * e2 * e2, a2 * e1 * e1
        s1, s2 = b1 * e2**3, b2 * e1**3
        if u1 == u2:
            if s1 + s2 == 0:
                return None
            return self.double(t1)
        h = u2 - u1
        r = s2 - s1
        h2 = h * h
        xn = r * r - h2 * (u1 + u2)
        yn = r * (u1 * h2 - xn) - s1 * h2 * h
        # the curve relation b1^2 - a1^3 = A a1 e1^4 + B e1^6 makes e1^2 | xn
        # and e1^3 | yn, so the first point's denominator can be stripped
        # before the normalization gcds run on the (much bigger) remainders
        e1sq = e1 * e1
        return self._normalize(xn // e1sq, yn // (e1sq * e1), e2 * h)


def _sequence_points(E: EllipticCurve, p: CurvePoint, step: CurvePoint, n_max: int) -> list:
    if E.p is None and E.a.denominator == 1 and E.b.denominator == 1:
        kernel = _IntegralKernel(E)
        cur = kernel.from_point(p)
        st = kernel.from_point(step)
        out = []
        for _ in range(n_max):
            cur = kernel.add(cur, st)
            out.append(kernel.to_point(cur))
        return out
    out = []
    cur = p
    for _ in range(n_max):
        cur = E.add(cur, step)
        out.append(cur)
    return out


@dataclass(frozen=True)
class QnReport:
    """q_n audit: `q_hits` lists every n with q_n = q; `avoids_q` means the
    sequence never returns to q after the definitional hit q_1 = q."""

    points: tuple
    all_distinct: bool
    collisions: tuple
    collisions_certified: bool
    avoids_q: bool
    q_hits: tuple

    def to_json(self) -> dict:
        return {
            "n_max": len(self.points),
            "points": [pt.to_json() for pt in self.points],
            "all_distinct": self.all_distinct,
            "collisions": [list(c) for c in self.collisions],
            "collisions_certified": self.collisions_certified,
            "avoids_q": self.avoids_q,
            "q_hits": list(self.q_hits),
        }


def qn_sequence(E: EllipticCurve, p: CurvePoint, q: CurvePoint, n_max: int) -> QnReport:
    """q_n = p + [n](q - p) for 1 <= n <= n_max, with distinctness audit.

    Each detected collision q_m = q_n (m < n) implies [n-m](q-p) = O; the
    implication is re-verified on the spot and reported.  The hit q_1 = q is
    definitional; `avoids_q` asserts there is no other hit, i.e. the
    sequence never returns to q (q_n = q for n >= 2 would force a torsion
    relation [n-1](q-p) = O).
    """
    if not isinstance(n_max, int) or n_max < 1:
        raise ValueError(f"n_max must be a positive integer, got {n_max!r}")
    E.check(p)
    E.check(q)
    if p == q:
        raise ValueError("base points must differ")
    step = E.sub(q, p)
    points = _sequence_points(E, p, step, n_max)
    seen: dict[CurvePoint, int] = {}
    collisions = []
    certified = True
    q_hits = []
    for idx, pt in enumerate(points, start=1):
        if pt in seen:
            m = seen[pt]
            collisions.append((m, idx))
            # q_m = q_n forces [n - m](q - p) = O
            certified = certified and E.mul(idx - m, step).is_infinity
        else:
            seen[pt] = idx
        if pt == q:
            q_hits.append(idx)
    return QnReport(
        points=tuple(points),
        all_distinct=not collisions,
        collisions=tuple(collisions),
        collisions_certified=certified,
        avoids_q=all(h == 1 for h in q_hits),
        q_hits=tuple(q_hits),
    )


@dataclass(frozen=True)
class WitnessVerdict:
    passed: bool
    bound: int
    failed_at: int | None
    certified_infinite: bool
    bounded_only: bool

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "bound": self.bound,
            "failed_at": self.failed_at,
            "certified_infinite": self.certified_infinite,
            "bounded_only": self.bounded_only,
        }


def infinite_order_witness(E: EllipticCurve, P: CurvePoint, bound: int) -> WitnessVerdict:
    """Check [m]P != O for 1 <= m <= bound.

    Over Q a pass with bound >= 12 certifies infinite order (torsion orders
    are at most 12).  Over a finite field every point is torsion, so the
    verdict is labeled a bounded check only.
    """
    if not isinstance(bound, int) or bound < 1:
        raise ValueError(f"bound must be a positive integer, got {bound!r}")
    E.check(P)
    acc = O
    failed_at = None
    for m in range(1, bound + 1):
        acc = E.add(acc, P)
        if acc.is_infinity:
            failed_at = m
            break
    passed = failed_at is None
    return WitnessVerdict(
        passed=passed,
        bound=bound,
        failed_at=failed_at,
        certified_infinite=passed and E.p is None and bound >= RATIONAL_TORSION_BOUND,
        bounded_only=E.p is not None,
    )


# -- restriction bookkeeping -------------------------------------------------------


@dataclass(frozen=True)
class RestrictionReport:
    n: int
    qn: CurvePoint
    assembled: DivisorClass
    trivial: bool
    abel_jacobi_consistent: bool
    exceptional_rules_coherent: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "qn": self.qn.to_json(),
            "assembled": self.assembled.to_json(),
            "trivial": self.trivial,
            "abel_jacobi_consistent": self.abel_jacobi_consistent,
            "exceptional_rules_coherent": self.exceptional_rules_coherent,
        }


def restriction_report(
    E: EllipticCurve,
    p: CurvePoint,
    q: CurvePoint,
    n: int,
    drop_exceptional_term: bool = False,
) -> RestrictionReport:
    """Replay the blowup restriction bookkeeping at level n.

    The assembled class is that of (n(q - p) + p) - q_n, i.e. the formal
    divisor [(q, n), (p, 1 - n), (q_n, -1)]; it must be trivial, which is
    exactly the statement that q_n represents the restricted bundle.  With
    `drop_exceptional_term` the -q_n term (the exceptional-curve pairing) is
    omitted, leaving a degree-1 class: the term is load-bearing.

    Two coherence checks ride along: the Abel-Jacobi identification
    class(n(q-p) + p) = (1, q_n) recomputed from scratch, and the
    exceptional pairing rules class(-p - q_n) + class(q_n) = class(-p).
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    E.check(p)
    E.check(q)
    qn = E.add(p, E.mul(n, E.sub(q, p)))
    divisor = [(q, n), (p, 1 - n)]
    if not drop_exceptional_term:
        divisor.append((qn, -1))
    assembled = class_of(E, divisor)
    aj = class_of(E, [(q, n), (p, 1 - n)]) == DivisorClass(1, qn)
    rules = class_add(
        E,
        class_of(E, [(p, -1), (qn, -1)]),  # self-intersection after blowup
        class_of(E, [(qn, 1)]),            # exceptional meets strict transform
    ) == class_of(E, [(p, -1)])            # self-intersection before blowup
    return RestrictionReport(
        n=n,
        qn=qn,
        assembled=assembled,
        trivial=assembled.is_trivial,
        abel_jacobi_consistent=aj,
        exceptional_rules_coherent=rules,
    )


def restriction_class(
    E: EllipticCurve,
    p: CurvePoint,
    q: CurvePoint,
    n: int,
    drop_exceptional_term: bool = False,
) -> DivisorClass:
    """The assembled restriction class; trivial iff the bookkeeping closes."""
    return restriction_report(E, p, q, n, drop_exceptional_term).assembled


# -- JSON ingestion ------------------------------------------------------------------


def _point_from_json(E: EllipticCurve, doc) -> CurvePoint:
    if doc == "O":
        return O
    if not isinstance(doc, dict) or set(doc) != {"x", "y"}:
        raise ValueError(f"point must be 'O' or an object with keys x, y: {doc!r}")
    if E.p is None:
        return E.check(CurvePoint(parse_rational(doc["x"]), parse_rational(doc["y"])))
    return E.check(CurvePoint(int(parse_rational(doc["x"])), int(parse_rational(doc["y"])) % E.p))


def curve_from_json(doc: dict) -> tuple[EllipticCurve, dict]:
    """Parse {"field": "Q"|{"p": prime}, "A": str, "B": str, "points": {...}}.

    Returns the curve and the named points (each 'O' or rational coords).
    """
    if not isinstance(doc, dict):
        raise ValueError("curve document must be a JSON object")
    field = doc.get("field")
    if field == "Q":
        p = None
    elif isinstance(field, dict) and set(field) == {"p"} and isinstance(field["p"], int):
        p = field["p"]
    else:
        raise ValueError(f"'field' must be 'Q' or {{'p': prime}}: {field!r}")
    if "A" not in doc or "B" not in doc:
        raise ValueError("curve document needs 'A' and 'B'")
    a = parse_rational(doc["A"])
    b = parse_rational(doc["B"])
    if p is not None:
        if a.denominator != 1 or b.denominator != 1:
            raise ValueError("A and B must be integers over a prime field")
        E = EllipticCurve(int(a), int(b), p)
    else:
        E = EllipticCurve(a, b)
    raw = doc.get("points", {})
    if not isinstance(raw, dict):
        raise ValueError("'points' must be an object")
    points = {name: _point_from_json(E, value) for name, value in raw.items()}
    return E, points


def curve_to_json(E: EllipticCurve, points: dict) -> dict:
    return {
        "field": "Q" if E.p is None else {"p": E.p},
        "A": _coord_str(E.a),
        "B": _coord_str(E.b),
        "points": {name: pt.to_json() for name, pt in sorted(points.items())},
    }


def default_curve() -> tuple[EllipticCurve, CurvePoint, CurvePoint]:
    """The default test instance: y^2 = x^3 - 2 over Q, p = O, q = (3, 5)."""
    E = EllipticCurve(Fraction(0), Fraction(-2))
    return E, O, E.check(CurvePoint(Fraction(3), Fraction(5)))
