"""Precision-p binary floating-point values with an unbounded exponent range.

A nonzero value is ``sign * X * 2**(e - p + 1)`` where the integral
significand ``X`` satisfies ``2**(p-1) <= X <= 2**p - 1``.  Only the two
round-to-nearest modes and multiplication are provided: that is all the
iterated-product error measurements need, and keeping the surface small
means every code path is exercised by the exact-rational cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

__all__ = [
    "EXPONENT_LIMIT",
    "ExponentRangeError",
    "FpNumber",
    "RoundingMode",
    "fp_mul",
    "normalized_fraction",
    "round_nearest",
    "to_rational",
]

# Exponents are confined to a fixed signed range so a runaway computation
# surfaces as an error instead of an absurd but silent value.  Desk-scale
# runs stay far below this.
EXPONENT_LIMIT = 2**62


class ExponentRangeError(OverflowError):
    """The exponent of a result left the supported range."""


class RoundingMode(Enum):
    """Tie-breaking rule for round-to-nearest."""

    TIES_EVEN = "even"  # on a tie, pick the even integral significand
    TIES_AWAY = "away"  # on a tie, pick the larger magnitude


def _check_precision(p: int) -> None:
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"precision must be an integer >= 2, got {p!r}")


def _check_exponent(e: int) -> None:
    if abs(e) > EXPONENT_LIMIT:
        raise ExponentRangeError(f"exponent {e} outside +/-{EXPONENT_LIMIT}")


@dataclass(frozen=True)
class FpNumber:
    """An immutable precision-p floating-point value.

    Zero has the single canonical representation
    ``FpNumber(1, 0, 0, p)``.
    """

    sign: int
    significand: int  # X: zero, or 2**(p-1) <= X <= 2**p - 1
    exponent: int  # e
    precision: int  # p

    def __post_init__(self) -> None:
        _check_precision(self.precision)
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")
        X = self.significand
        if X == 0:
            if self.sign != 1 or self.exponent != 0:
                raise ValueError("zero must be represented as (sign=+1, X=0, e=0)")
        elif not (1 << (self.precision - 1)) <= X <= (1 << self.precision) - 1:
            raise ValueError(
                f"significand {X} not normalised for precision {self.precision}"
            )
        _check_exponent(self.exponent)

    @property
    def is_zero(self) -> bool:
        return self.significand == 0

    def to_fraction(self) -> Fraction:
        """Exact value ``sign * X * 2**(e - p + 1)``."""
        if self.is_zero:
            return Fraction(0)
        s = self.exponent - self.precision + 1
        if s >= 0:
            return Fraction(self.sign * (self.significand << s))
        return Fraction(self.sign * self.significand, 1 << -s)

    @staticmethod
    def zero(p: int) -> "FpNumber":
        return FpNumber(1, 0, 0, p)


def _binade(num: int, den: int) -> int:
    """Largest e with 2**e <= num/den, for positive num/den, exactly."""
    e = num.bit_length() - den.bit_length()
    if e >= 0:
        if num < den << e:
            e -= 1
    elif num << -e < den:
        e -= 1
    return e


def round_nearest(
    t: Fraction | int,
    p: int,
    mode: RoundingMode = RoundingMode.TIES_EVEN,
) -> FpNumber:
    """Round the exact rational ``t`` to the nearest precision-p value.

    Exact ties go to the even integral significand under TIES_EVEN and to
    the larger magnitude under TIES_AWAY.  The binade is located by integer
    bit-length comparison, never by a floating-point logarithm.
    """
    _check_precision(p)
    t = Fraction(t)
    if t == 0:
        return FpNumber.zero(p)
    sign = 1 if t > 0 else -1
    num, den = abs(t.numerator), t.denominator
    e = _binade(num, den)
    # Scale so that q = floor(|t| * 2**(p-1-e)) is the lower candidate.
    s = p - 1 - e
    if s >= 0:
        num <<= s
    else:
        den <<= -s
    q, r = divmod(num, den)
    r2 = 2 * r
    if r2 > den or (r2 == den and (mode is RoundingMode.TIES_AWAY or q & 1)):
        q += 1
    if q == 1 << p:  # rounded up across the binade boundary
        q = 1 << (p - 1)
        e += 1
    _check_exponent(e)
    return FpNumber(sign, q, e, p)


def fp_mul(
    a: FpNumber,
    b: FpNumber,
    mode: RoundingMode = RoundingMode.TIES_EVEN,
) -> FpNumber:
    """Correctly rounded product of two same-precision values.

    The exact product has at most 2p significand bits, so this is pure
    integer work; the result equals ``round_nearest`` of the exact product.
    """
    if a.precision != b.precision:
        raise ValueError(
            f"precision mismatch: {a.precision} vs {b.precision}"
        )
    p = a.precision
    if a.is_zero or b.is_zero:
        return FpNumber.zero(p)
    P = a.significand * b.significand  # 2p-1 or 2p bits
    e = a.exponent + b.exponent
    bits = P.bit_length()
    if bits == 2 * p:
        e += 1
    shift = bits - p
    q = P >> shift
    r = P - (q << shift)
    half = 1 << (shift - 1)
    if r > half or (r == half and (mode is RoundingMode.TIES_AWAY or q & 1)):
        q += 1
        if q == 1 << p:
            q = 1 << (p - 1)
            e += 1
    _check_exponent(e)
    return FpNumber(a.sign * b.sign, q, e, p)


def normalized_fraction(t: Fraction | int) -> Fraction:
    """Scale ``t`` by a power of two into 1 <= |result| < 2, exactly."""
    t = Fraction(t)
    if t == 0:
        raise ValueError("zero has no binade")
    e = _binade(abs(t.numerator), t.denominator)
    if e >= 0:
        return Fraction(t.numerator, t.denominator << e)
    return t * (1 << -e)


def to_rational(a: FpNumber) -> Fraction:
    """Exact rational value of ``a``."""
    return a.to_fraction()
