"""Exact-rational measurement of rounding error, in units of u = 2**-p.

All arithmetic here is done on ``fractions.Fraction``; nothing is ever
rounded except the final decimal rendering, which truncates toward zero
so printed digits are always a correct prefix of the exact value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .softfloat import FpNumber

__all__ = ["ErrorInUlps", "relative_error", "to_decimal"]


@dataclass(frozen=True, order=True)
class ErrorInUlps:
    """A non-negative relative error divided by the unit roundoff."""

    value: Fraction

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("error in ulps cannot be negative")

    def decimal(self, digits: int = 9) -> str:
        return to_decimal(self.value, digits)

    def __float__(self) -> float:
        return float(self.value)


def relative_error(computed: FpNumber, exact: Fraction | int) -> ErrorInUlps:
    """|computed - exact| / (|exact| * 2**-p), exactly.

    ``p`` is the precision carried by ``computed``.
    """
    exact = Fraction(exact)
    if exact == 0:
        raise ValueError("relative error against a zero exact value is undefined")
    diff = abs(computed.to_fraction() - exact)
    return ErrorInUlps(diff * (1 << computed.precision) / abs(exact))


def to_decimal(value: Fraction | ErrorInUlps, digits: int = 9) -> str:
    """Decimal expansion with ``digits`` fractional digits, truncated toward zero.

    Truncation (rather than rounding) keeps the output a prefix of the
    exact expansion: ``to_decimal(v, d)`` and ``to_decimal(v, d+1)`` agree
    on their first ``d`` digits.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    if isinstance(value, ErrorInUlps):
        value = value.value
    value = Fraction(value)
    sign = "-" if value < 0 else ""
    num, den = abs(value.numerator), value.denominator
    whole, rem = divmod(num, den)
    frac = rem * 10**digits // den
    return f"{sign}{whole}.{frac:0{digits}d}"
