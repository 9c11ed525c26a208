"""The two evaluation schemes under study, with full per-step traces.

``naive_power`` computes x**n by n-1 successive multiplications by x;
``iterated_product`` folds a factor list strictly left to right.  Traces
keep every intermediate together with the rounding direction of each
step, which is what the worst-case forensics and the downward-rounding
checks feed on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .softfloat import FpNumber, RoundingMode, fp_mul

__all__ = [
    "PowerStep",
    "PowerTrace",
    "ProductTrace",
    "iterated_product",
    "naive_power",
]

# Sign of (rounded - exact) for one multiplication.
DOWN, EXACT, UP = "down", "exact", "up"


def _direction(rounded: Fraction, exact: Fraction) -> str:
    if rounded == exact:
        return EXACT
    return DOWN if rounded < exact else UP


def _mul_direction(a: FpNumber, b: FpNumber, result: FpNumber) -> str:
    """Sign of (result - a*b) using integers only.

    Comparing through Fraction would materialise 2**e values, which for
    large exponents is enormous; the scaled-significand comparison is not.
    """
    if result.is_zero:
        return EXACT  # only possible when a or b is zero
    # both sides scaled by 2**(2p - 2 - ea - eb) > 0, preserving order
    exact_scaled = a.sign * b.sign * a.significand * b.significand
    shift = result.exponent - a.exponent - b.exponent + result.precision - 1
    rounded_scaled = result.sign * (result.significand << shift)
    if rounded_scaled == exact_scaled:
        return EXACT
    return DOWN if rounded_scaled < exact_scaled else UP


@dataclass(frozen=True)
class PowerStep:
    k: int  # this step produced the approximation of x**k
    value: FpNumber
    direction: str


@dataclass(frozen=True)
class PowerTrace:
    x: FpNumber
    n: int
    steps: tuple[PowerStep, ...]
    final: FpNumber


@dataclass(frozen=True)
class ProductTrace:
    factors: tuple[FpNumber, ...]
    partials: tuple[FpNumber, ...]  # running rounded products, first is factors[0]
    final: FpNumber


def naive_power(
    x: FpNumber,
    n: int,
    mode: RoundingMode = RoundingMode.TIES_EVEN,
) -> PowerTrace:
    """Iterate y <- round(x * y) for k = 2..n, recording every step.

    n = 1 returns x itself with an empty step list.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    steps = []
    y = x
    for k in range(2, n + 1):
        prev = y
        y = fp_mul(x, y, mode)
        steps.append(PowerStep(k, y, _mul_direction(x, prev, y)))
    return PowerTrace(x, n, tuple(steps), y)


def iterated_product(
    factors: list[FpNumber] | tuple[FpNumber, ...],
    mode: RoundingMode = RoundingMode.TIES_EVEN,
) -> ProductTrace:
    """Left-to-right rounded product of the factors, recording every partial."""
    if not factors:
        raise ValueError("at least one factor is required")
    p = factors[0].precision
    for f in factors[1:]:
        if f.precision != p:
            raise ValueError(f"precision mismatch: {f.precision} vs {p}")
    acc = factors[0]
    partials = [acc]
    for f in factors[1:]:
        acc = fp_mul(acc, f, mode)
        partials.append(acc)
    return ProductTrace(tuple(factors), tuple(partials), acc)
