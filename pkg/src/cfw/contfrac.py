"""Exact continued-fraction engine.

Everything here is integer or ``Fraction`` arithmetic.  Real numbers given by
(possibly infinite) expansions ``[0; a_1, a_2, ...]`` are handled through
rational enclosures built from convergents.
"""

from __future__ import annotations

import os
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from cfw.errors import ArithmeticCapError, ContractError, IndeterminateError
from cfw.words import FiniteWord

CAP_ENV = "CFW_MAX_BIGINT_BITS"


def bit_cap() -> int | None:
    raw = os.environ.get(CAP_ENV, "").strip()
    if not raw:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise ContractError(f"{CAP_ENV} must be an integer, got {raw!r}") from None
    return cap if cap > 0 else None


@dataclass(frozen=True)
class Convergent:
    index: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


class ConvergentTable:
    """``p_ell`` and ``q_ell`` for ``ell = -1 .. len(a)``.

    Seeded with ``p_{-1} = q_0 = 1`` and ``q_{-1} = p_0 = 0``.
    """

    def __init__(self, a: Sequence[int]):
        self.word = FiniteWord(a)
        cap = bit_cap()
        ps, qs = [1, 0], [0, 1]
        for ell, x in enumerate(self.word, start=1):
            ps.append(x * ps[-1] + ps[-2])
            qs.append(x * qs[-1] + qs[-2])
            if cap is not None and qs[-1].bit_length() > cap:
                raise ArithmeticCapError(
                    f"q_{ell} has {qs[-1].bit_length()} bits, above {CAP_ENV}={cap}"
                )
        self._p = ps
        self._q = qs

    def __len__(self) -> int:
        return len(self.word)

    def _check(self, ell: int) -> int:
        if not -1 <= ell <= len(self.word):
            raise ContractError(f"convergent index {ell} outside -1..{len(self.word)}")
        return ell + 1

    def p(self, ell: int) -> int:
        return self._p[self._check(ell)]

    def q(self, ell: int) -> int:
        return self._q[self._check(ell)]

    def value(self, ell: int) -> Fraction:
        return Fraction(self.p(ell), self.q(ell))

    def cylinder(self) -> RationalInterval:
        """All reals whose expansion begins with the table's word."""
        n = len(self.word)
        if n == 0:
            return RationalInterval(Fraction(0), Fraction(1))
        return RationalInterval.hull(
            Fraction(self.p(n), self.q(n)),
            Fraction(self.p(n) + self.p(n - 1), self.q(n) + self.q(n - 1)),
        )


def convergents(a: Sequence[int]) -> list[Convergent]:
    """``(p_ell, q_ell)`` for ``ell = -1 .. len(a)`` from the three-term recurrence."""
    t = ConvergentTable(a)
    return [Convergent(ell, t.p(ell), t.q(ell)) for ell in range(-1, len(a) + 1)]


def cf_value(a: Sequence[int]) -> Fraction:
    """``[0; a_1, ..., a_n]`` by nested evaluation from the innermost term."""
    num, den = 0, 1
    for x in reversed(FiniteWord(a)):
        num, den = den, x * den + num
    return Fraction(num, den)


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ContractError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> RationalInterval:
        return cls(x, x)

    @classmethod
    def hull(cls, *xs) -> RationalInterval:
        xs = [Fraction(x) for x in xs]
        return cls(min(xs), max(xs))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def intersects(self, other: RationalInterval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    @staticmethod
    def _coerce(x) -> RationalInterval:
        return x if isinstance(x, RationalInterval) else RationalInterval.point(x)

    def __add__(self, other):
        o = self._coerce(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RationalInterval.hull(
            self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise IndeterminateError("division by an interval containing 0")
        return self * RationalInterval.hull(1 / o.lo, 1 / o.hi)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RationalInterval(Fraction(0), max(-self.lo, self.hi))

    def to_json(self) -> list[str]:
        return [fraction_str(self.lo), fraction_str(self.hi)]


def fraction_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def decide(value: RationalInterval, bound, strict: bool) -> bool | None:
    """Decide ``value < bound`` (strict) or ``value <= bound`` for every point.

    Returns ``True`` when all of ``value`` satisfies it, ``False`` when no
    point does, ``None`` when the enclosure straddles the bound.
    """
    bound = Fraction(bound)
    if strict:
        if value.hi < bound:
            return True
        if value.lo >= bound:
            return False
    else:
        if value.hi <= bound:
            return True
        if value.lo > bound:
            return False
    return None


def quadratic_at(a, b, c, x: RationalInterval) -> RationalInterval:
    """Enclosure of ``a x^2 + b x + c`` over ``x``.

    Uses the exact Taylor expansion at the midpoint, which is much tighter
    than naive interval evaluation when the value is close to 0.
    """
    m = x.mid
    h = x - m
    center = a * m * m + b * m + c
    slope = 2 * a * m + b
    sq = RationalInterval(Fraction(0), max(h.lo * h.lo, h.hi * h.hi))
    return center + slope * h + a * sq


def enclose_value(a: Sequence[int], depth: int) -> RationalInterval:
    """Interval between ``p_depth/q_depth`` and ``p_{depth+1}/q_{depth+1}``.

    Contains every real whose expansion begins with ``a``.
    """
    a = FiniteWord(a)
    if not 0 <= depth <= len(a) - 1:
        raise ContractError(f"depth {depth} outside 0..{len(a) - 1}")
    t = ConvergentTable(a[: depth + 1])
    return RationalInterval.hull(t.value(depth), t.value(depth + 1))


def cylinder(a: Sequence[int]) -> RationalInterval:
    """Smallest closed interval holding every real whose expansion begins with ``a``."""
    return ConvergentTable(a).cylinder()


def check_approx_bound(a: Sequence[int], ell: int) -> tuple[bool, Fraction]:
    """Check ``|q_ell x - p_ell| < 1/q_{ell+1}`` for every ``x`` with prefix ``a``.

    Returns the verdict and the exact slack ``1/q_{ell+1} - sup |q_ell x - p_ell|``.
    Raises ``IndeterminateError`` when the prefix is too short to decide.
    """
    a = FiniteWord(a)
    if ell < 1 or ell > len(a) - 1:
        raise ContractError(f"ell={ell} outside 1..{len(a) - 1}")
    t = ConvergentTable(a)
    box = t.cylinder()
    # |q x - p| is convex in x: the supremum sits at an endpoint
    dev = abs(box * t.q(ell) - t.p(ell))
    bound = Fraction(1, t.q(ell + 1))
    verdict = decide(dev, bound, strict=True)
    if verdict is None:
        raise IndeterminateError(
            f"prefix of length {len(a)} cannot decide the bound at ell={ell}; extend it"
        )
    return verdict, bound - dev.hi


def check_growth_bound(a: Sequence[int], ell: int, h: int) -> bool:
    """``q_{ell+h} >= q_ell * sqrt(2)^(h-1)``, compared in squared integer form."""
    a = FiniteWord(a)
    if ell < 1 or h < 1 or ell + h > len(a):
        raise ContractError(f"need ell >= 1, h >= 1, ell + h <= {len(a)}")
    t = ConvergentTable(a)
    return t.q(ell + h) ** 2 >= t.q(ell) ** 2 << (h - 1)


def mirror_formula(a: Sequence[int], ell: int) -> bool:
    """``q_{ell-1}/q_ell == [0; a_ell, ..., a_1]`` exactly."""
    a = FiniteWord(a)
    if not 1 <= ell <= len(a):
        raise ContractError(f"ell={ell} outside 1..{len(a)}")
    t = ConvergentTable(a[:ell])
    return Fraction(t.q(ell - 1), t.q(ell)) == cf_value(a[:ell].mirror())


def last_convergent(a: Sequence[int]) -> tuple[int, int]:
    """``(p_{L-1}, q_{L-1})`` for ``L = len(a)``."""
    a = FiniteWord(a)
    if len(a) < 2:
        raise ContractError("need at least two partial quotients")
    t = ConvergentTable(a)
    return t.p(len(a) - 1), t.q(len(a) - 1)


@dataclass(frozen=True)
class QuadraticApproximant:
    """Value of ``[0; preperiod, period, period, ...]`` as a root of
    ``a X^2 - b X + c``.

    ``sign`` picks the root ``(b + sign * sqrt(b^2 - 4ac)) / (2a)``.
    Coefficients are kept as computed, without dividing out their content.
    """

    preperiod: FiniteWord
    period: FiniteWord
    a: int
    b: int
    c: int
    sign: int

    @property
    def height(self) -> int:
        return max(abs(self.a), abs(self.b), abs(self.c))

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x):
        """Evaluate the polynomial at a rational or an interval."""
        if isinstance(x, RationalInterval):
            return quadratic_at(self.a, -self.b, self.c, x)
        x = Fraction(x)
        return self.a * x * x - self.b * x + self.c

    def expansion_enclosure(self, repeats: int) -> RationalInterval:
        """Cylinder of the preperiod followed by ``repeats`` copies of the period."""
        return cylinder(self.preperiod + self.period * repeats)

    def root_interval(self, bits: int, sign: int | None = None) -> RationalInterval:
        """Enclosure of the selected root (or the one given by ``sign``) of
        width about ``2**-bits / |a|``."""
        sign = self.sign if sign is None else sign
        d = self.discriminant
        s = isqrt(d << (2 * bits))
        scale = 1 << bits
        sqrt_lo = Fraction(s, scale)
        sqrt_hi = sqrt_lo if s * s == d << (2 * bits) else Fraction(s + 1, scale)
        ends = [(self.b + sign * r) / (2 * self.a) for r in (sqrt_lo, sqrt_hi)]
        return RationalInterval.hull(*ends)

    def value_interval(self, max_width) -> RationalInterval:
        """Enclosure of the value no wider than ``max_width``."""
        max_width = Fraction(max_width)
        bits = 8
        while True:
            box = self.root_interval(bits)
            if box.width <= max_width:
                return box
            bits *= 2


def periodic_coefficients(preperiod: Sequence[int], period: Sequence[int]) -> tuple[int, int, int]:
    """Integer ``(A, B, C)`` with ``A X^2 - B X + C`` vanishing at
    ``[0; preperiod, period, period, ...]``, from the convergents at indices
    ``w-1, w, w+T-1, w+T`` of ``preperiod + period`` (``w``, ``T`` their lengths).
    """
    pre, per = FiniteWord(preperiod), FiniteWord(period)
    w, e = len(pre), len(pre) + len(per)
    t = ConvergentTable(pre + per)
    A = t.q(w - 1) * t.q(e) - t.q(w) * t.q(e - 1)
    B = (t.q(w - 1) * t.p(e) - t.q(w) * t.p(e - 1)
         + t.p(w - 1) * t.q(e) - t.p(w) * t.q(e - 1))
    C = t.p(w - 1) * t.p(e) - t.p(w) * t.p(e - 1)
    return A, B, C


def periodic_value(preperiod: Sequence[int], period: Sequence[int]) -> QuadraticApproximant:
    """Quadratic polynomial and root selection for an ultimately periodic expansion.

    Of the two real roots, the one inside the cylinder of the expansion is
    kept; the cylinder is deepened one period at a time until exactly one
    root remains in it.
    """
    pre, per = FiniteWord(preperiod), FiniteWord(period)
    if not per:
        raise ContractError("period must be non-empty")
    A, B, C = periodic_coefficients(pre, per)
    if A == 0 or B * B - 4 * A * C <= 0:
        raise ContractError(f"degenerate polynomial ({A}, {B}, {C})")
    probe = QuadraticApproximant(pre, per, A, B, C, 1)
    bits = 16
    for repeats in range(1, 200):
        box = probe.expansion_enclosure(repeats)
        hits = [s for s in (1, -1) if probe.root_interval(bits, s).intersects(box)]
        if len(hits) == 1:
            return QuadraticApproximant(pre, per, A, B, C, hits[0])
        if not hits:
            raise ArithmeticError(
                f"no root of {A}X^2 - {B}X + {C} lies in the expansion's enclosure"
            )
        bits += 16
    raise IndeterminateError("could not separate the two roots")
