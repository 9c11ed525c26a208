"""Construction of factor sequences whose rounded product errs near n-1 ulps.

The iterated product of n factors cannot lose more than about n-1 ulps,
one per rounded multiplication.  This module builds sequences that come
within a whisker of that ceiling: every factor is chosen so that the next
rounded partial lands just below the exact one, so the per-step losses
all point the same way and accumulate instead of cancelling.

The recipe works in the binade [1, 2), where consecutive floats are
2**(-p+1) apart.  Seed with a_1 = a_2 = 1 + K*2**(-p+1), K = floor of
2**(p/2-1): the square 1 + 2K*2**(-p+1) + K**2*2**(-2p+2) then overshoots
a float by almost half a spacing, which rounding discards.  After that,
write the current partial as 1 + g*2**(-p+1) and pick the next factor
1 + k*2**(-p+1) (k of either sign) so the new cross term again sits just
under the rounding threshold.  All index arithmetic is exact integer
ceil/floor; nothing here depends on double-precision evaluation.

Only round-to-nearest ties-to-even is supported.  The seed square can be
an exact tie (it is whenever p is even, since then K**2*2**(-2p+2) equals
half a spacing), and the scheme needs that tie to round down, which
even-tie-breaking does and away-tie-breaking does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algorithms import DOWN, ProductTrace, _direction, iterated_product
from .exact import ErrorInUlps, relative_error
from .softfloat import FpNumber, RoundingMode, round_nearest

__all__ = [
    "AdversarySequence",
    "SequenceConstructionError",
    "SequenceReport",
    "build_sequence",
    "verify_sequence",
]

MIN_PRECISION = 8  # below this the binade is too coarse for the drift to set up


class SequenceConstructionError(ValueError):
    """A partial product left the window the construction relies on."""

    def __init__(self, step: int, message: str) -> None:
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class AdversarySequence:
    p: int
    n: int
    factors: tuple[FpNumber, ...]
    trace: ProductTrace
    achieved_error: ErrorInUlps  # exact error of trace.final, in ulps

    def exact_product(self) -> Fraction:
        prod = Fraction(1)
        for f in self.factors:
            prod *= f.to_fraction()
        return prod


@dataclass(frozen=True)
class SequenceReport:
    """Outcome of independently re-running and checking a sequence."""

    p: int
    n: int
    directions: tuple[str, ...]  # one per rounded multiplication
    all_down: bool
    achieved_error: ErrorInUlps
    error_bound: int  # n - 1
    below_bound: bool
    gap: Fraction  # error_bound - achieved_error, in ulps
    passed: bool


def _grid_factor(k: int, p: int) -> FpNumber:
    """The float 1 + k*2**(-p+1), which must be exactly representable."""
    value = Fraction((1 << (p - 1)) + k, 1 << (p - 1))
    f = round_nearest(value, p)
    if f.to_fraction() != value:
        raise ValueError(f"1 + {k}*2**(-{p}+1) is not a precision-{p} float")
    return f


def build_sequence(p: int, n: int) -> AdversarySequence:
    """Build n factors whose ties-to-even product loses almost n-1 ulps.

    Factors are emitted in the order they must be multiplied; the choice
    of factor i+1 depends on the rounded partial after factor i, so the
    sequence is specific to left-to-right evaluation at precision p.
    """
    if p < MIN_PRECISION:
        raise ValueError(f"p must be >= {MIN_PRECISION}, got {p}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    mode = RoundingMode.TIES_EVEN
    quarter = 1 << (p - 2)
    seed_k = math.isqrt(quarter)  # floor(2**(p/2 - 1))
    seed = _grid_factor(seed_k, p)
    factors = [seed, seed]
    trace = iterated_product(factors, mode)
    cur = trace.final
    for i in range(2, n):
        if cur.exponent != 0:
            raise SequenceConstructionError(
                i, f"partial product left [1, 2): {cur.to_fraction()}"
            )
        g = cur.significand - (1 << (p - 1))
        if g < 1:
            raise SequenceConstructionError(i, "partial product fell back to 1")
        if g * g <= quarter:
            # ceil(2**(p-2)/g - 1), exactly
            k = -((g - quarter) // g)
        else:
            k = -(quarter // g + 1)
        try:
            nxt = _grid_factor(k, p)
        except ValueError as exc:
            raise SequenceConstructionError(i, str(exc)) from exc
        factors.append(nxt)
        trace = iterated_product(factors, mode)
        cur = trace.final
    exact = Fraction(1)
    for f in factors:
        exact *= f.to_fraction()
    achieved = relative_error(trace.final, exact)
    return AdversarySequence(p, n, tuple(factors), trace, achieved)


def verify_sequence(seq: AdversarySequence) -> SequenceReport:
    """Re-run the product from scratch and check the claimed behaviour.

    Passing means: the recomputed trace matches, every one of the n-1
    rounded multiplications rounded downward, and the achieved error is
    strictly below n-1 ulps.
    """
    trace = iterated_product(seq.factors, RoundingMode.TIES_EVEN)
    consistent = trace == seq.trace
    directions = []
    running = trace.partials[0].to_fraction()
    for f, rounded in zip(trace.factors[1:], trace.partials[1:]):
        step_exact = running * f.to_fraction()
        running = rounded.to_fraction()
        directions.append(_direction(running, step_exact))
    all_down = all(d == DOWN for d in directions)
    achieved = relative_error(trace.final, seq.exact_product())
    bound = seq.n - 1
    below = achieved.value < bound
    return SequenceReport(
        p=seq.p,
        n=seq.n,
        directions=tuple(directions),
        all_down=all_down,
        achieved_error=achieved,
        error_bound=bound,
        below_bound=below,
        gap=bound - achieved.value,
        passed=consistent and all_down and below,
    )
