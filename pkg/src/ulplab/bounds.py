"""Closed-form error bounds, threshold constants, and their numeric checks.

Everything is exact: classical bounds are rationals, and the irrational
thresholds (the square root of the cube root of 2 minus 1, and its per
precision variant) are handled as shrinking rational enclosures computed
by integer root extraction.  Comparisons against a threshold go through
the enclosure and the enclosure is narrowed until the comparison is
decided, so no double-precision rounding can leak into a result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import NamedTuple

__all__ = [
    "BoundSet",
    "CheckReport",
    "Enclosure",
    "ThresholdConstants",
    "alpha",
    "alpha_below_limit",
    "alpha_exceeds_beta",
    "beta",
    "bound_set",
    "check_lemma2",
    "check_property1",
    "check_refined_binary32_bound",
    "n_max",
    "threshold_constants",
    "unit_roundoff",
]

DEFAULT_ENCLOSURE_BITS = 80
_MAX_ENCLOSURE_BITS = 4096


class Enclosure(NamedTuple):
    """A rational interval [lo, hi] known to contain an irrational constant."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


@dataclass(frozen=True)
class BoundSet:
    """The classical relative-error bounds at precision p for an n-term chain.

    All fields are exact rationals (relative errors, not ulp counts):
    simple = (n-1)u, psi = (1+u)**(n-1) - 1, gamma = (n-1)u / (1-(n-1)u),
    refined_unit = u/(1+u).
    """

    p: int
    n: int
    u: Fraction
    simple: Fraction
    psi: Fraction
    gamma: Fraction
    refined_unit: Fraction


@dataclass(frozen=True)
class ThresholdConstants:
    """Enclosures of the proof thresholds plus the resulting n cutoff."""

    p: int
    alpha: Enclosure
    beta: Enclosure
    n_max: int


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one exact verification sweep."""

    name: str
    passed: bool
    checked: int
    details: dict = field(default_factory=dict)


def unit_roundoff(p: int) -> Fraction:
    if p < 2:
        raise ValueError(f"precision must be >= 2, got {p}")
    return Fraction(1, 1 << p)


def bound_set(p: int, n: int) -> BoundSet:
    """Exact bound values for an (n-1)-multiplication chain at precision p."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    u = unit_roundoff(p)
    k = n - 1
    if k * u >= 1:
        raise ValueError(f"gamma undefined: (n-1)*u = {k * u} >= 1")
    return BoundSet(
        p=p,
        n=n,
        u=u,
        simple=k * u,
        psi=(1 + u) ** k - 1,
        gamma=k * u / (1 - k * u),
        refined_unit=u / (1 + u),
    )


def _iroot(a: int, k: int) -> int:
    """floor(a ** (1/k)) for a >= 0, k >= 1, by integer Newton iteration."""
    if a < 0 or k < 1:
        raise ValueError("need a >= 0 and k >= 1")
    if a == 0:
        return 0
    x = 1 << -(-a.bit_length() // k)  # >= true root
    while True:
        y = ((k - 1) * x + a // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > a:
        x -= 1
    while (x + 1) ** k <= a:
        x += 1
    return x


def _max_below(estimate: int, pred) -> int:
    """Largest m with pred(m) true, given a within-a-few estimate."""
    m = max(estimate, 0)
    while not pred(m):
        m -= 1
    while pred(m + 1):
        m += 1
    return m


def _beta_scaled(bits: int) -> int:
    # largest m with (m/2**bits)**2 <= 2**(1/3) - 1, i.e.
    # (m**2 + 2**(2*bits))**3 <= 2**(6*bits + 1)
    two2n = 1 << (2 * bits)
    bound = 1 << (6 * bits + 1)
    est = isqrt(max(_iroot(bound, 3) - two2n, 0))
    return _max_below(est, lambda m: (m * m + two2n) ** 3 <= bound)


def beta(bits: int = DEFAULT_ENCLOSURE_BITS) -> Enclosure:
    """Enclosure of sqrt(2**(1/3) - 1) of width 2**-bits."""
    m = _beta_scaled(bits)
    den = 1 << bits
    return Enclosure(Fraction(m, den), Fraction(m + 1, den))


def _alpha_scaled(p: int, bits: int) -> int:
    # alpha_p**2 = (2**(p+1) / (2**p + 1))**(2/3) - 1; largest m with
    # (m**2 + 2**(2*bits))**3 * (2**p + 1)**2 <= 2**(2p + 2 + 6*bits)
    two2n = 1 << (2 * bits)
    d = (1 << p) + 1
    bound = 1 << (2 * p + 2 + 6 * bits)
    est = isqrt(max(_iroot(bound // (d * d), 3) - two2n, 0))
    return _max_below(est, lambda m: (m * m + two2n) ** 3 * d * d <= bound)


def alpha(p: int, bits: int = DEFAULT_ENCLOSURE_BITS) -> Enclosure:
    """Enclosure of sqrt((2**(p+1)/(2**p+1))**(2/3) - 1) of width 2**-bits."""
    if p < 5:
        raise ValueError(f"alpha is only used for p >= 5, got {p}")
    m = _alpha_scaled(p, bits)
    den = 1 << bits
    return Enclosure(Fraction(m, den), Fraction(m + 1, den))


def _alpha_limit_scaled(bits: int) -> int:
    # the p -> infinity limit sqrt(2**(2/3) - 1): largest m with
    # (m**2 + 2**(2*bits))**3 <= 2**(6*bits + 2)
    two2n = 1 << (2 * bits)
    bound = 1 << (6 * bits + 2)
    est = isqrt(max(_iroot(bound, 3) - two2n, 0))
    return _max_below(est, lambda m: (m * m + two2n) ** 3 <= bound)


def alpha_limit(bits: int = DEFAULT_ENCLOSURE_BITS) -> Enclosure:
    m = _alpha_limit_scaled(bits)
    den = 1 << bits
    return Enclosure(Fraction(m, den), Fraction(m + 1, den))


def _decide(make_a, make_b) -> bool:
    """True iff constant a > constant b, narrowing both enclosures as needed."""
    bits = DEFAULT_ENCLOSURE_BITS
    while bits <= _MAX_ENCLOSURE_BITS:
        ea, eb = make_a(bits), make_b(bits)
        if ea.lo > eb.hi:
            return True
        if ea.hi < eb.lo:
            return False
        bits *= 2
    raise RuntimeError("enclosures failed to separate (constants may be equal)")


def alpha_exceeds_beta(p: int) -> bool:
    return _decide(lambda b: alpha(p, b), beta)


def alpha_below_limit(p: int) -> bool:
    """alpha_p < sqrt(2**(2/3) - 1), decided through enclosures."""
    return _decide(lambda b: alpha_limit(b), lambda b: alpha(p, b))


def n_max(p: int) -> int:
    """Largest n with n <= sqrt(2**(1/3) - 1) * 2**(p/2), exactly.

    The comparison n <= beta * 2**(p/2) is squared and cubed into the pure
    integer predicate (n**2 + 2**p)**3 <= 2**(3p+1), so no rounding of the
    irrational threshold is involved.
    """
    if p < 5:
        raise ValueError(f"n_max requires p >= 5, got {p}")
    two_p = 1 << p
    bound = 1 << (3 * p + 1)
    est = isqrt(max(_iroot(bound, 3) - two_p, 0))
    return _max_below(est, lambda m: (m * m + two_p) ** 3 <= bound)


def threshold_constants(p: int, bits: int = DEFAULT_ENCLOSURE_BITS) -> ThresholdConstants:
    return ThresholdConstants(p=p, alpha=alpha(p, bits), beta=beta(bits), n_max=n_max(p))


def _property1_grid() -> list[Fraction]:
    grid = [Fraction(1, 1 << j) for j in range(5, 61)]
    grid += [Fraction(1, 33), Fraction(1, 100), Fraction(3, 1000)]
    return grid


def check_property1() -> CheckReport:
    """(1 + u/(1+u))**k < 1 + k*u for k <= 3, and fails for some u at k = 4.

    Verified exactly on a grid of rational u in (0, 1/32]; the k = 4
    counterexample is searched over u = 2**-j, j = 4..60.
    """
    checked = 0
    failures = []
    for k in (1, 2, 3):
        for u in _property1_grid():
            checked += 1
            if not (1 + u / (1 + u)) ** k < 1 + k * u:
                failures.append((k, u))
    counterexample = None
    for j in range(4, 61):
        u = Fraction(1, 1 << j)
        if (1 + u / (1 + u)) ** 4 >= 1 + 4 * u:
            counterexample = u
            break
    passed = not failures and counterexample is not None
    return CheckReport(
        name="property1",
        passed=passed,
        checked=checked,
        details={
            "failures": [f"k={k} u={u}" for k, u in failures],
            "k4_counterexample_u": str(counterexample),
        },
    )


def _lemma2_samples(n: int, subdivisions: int) -> list[Fraction]:
    top = Fraction(2, 3 * n * n)
    samples = [top * Fraction(j, subdivisions) for j in range(subdivisions + 1)]
    j = 1
    while Fraction(1, 1 << j) > top:
        j += 1
    samples += [Fraction(1, 1 << jj) for jj in range(j, min(j + 20, 64))]
    return samples


def check_lemma2(n_grid: list[int] | None = None, subdivisions: int = 16) -> CheckReport:
    """(1+u)**(n-2) * (1 + u/(1+n^2 u)) <= 1 + (n-1)u on 0 <= u <= 2/(3n^2).

    Sampled exactly: the endpoints, a uniform rational subdivision of the
    interval, and the dyadic points 2**-j that fall inside it.  This is a
    regression guard on the inequality, not a proof over the continuum.
    """
    if n_grid is None:
        n_grid = [3, 4, 5, 6, 10, 32, 100, 1000]
    if any(n < 3 for n in n_grid):
        raise ValueError("lemma 2 grid needs n >= 3")
    checked = 0
    failures = []
    for n in n_grid:
        for u in _lemma2_samples(n, subdivisions):
            checked += 1
            lhs = (1 + u) ** (n - 2) * (1 + u / (1 + n * n * u))
            if not lhs <= 1 + (n - 1) * u:
                failures.append((n, u))
    return CheckReport(
        name="lemma2",
        passed=not failures,
        checked=checked,
        details={"failures": [f"n={n} u={u}" for n, u in failures]},
    )


def _refined_binary32_holds(n: int, m_pow: int) -> bool:
    # (1 + 7.06u)(1+u)**(n-10) - 1 <= (n - 2.8104)u at u = 2**-24, with
    # m_pow = (2**24 + 1)**(n-10); cleared of denominators this is exactly:
    lhs = 100 * ((100 << 24) + 706) * m_pow
    rhs = ((10_000 << 24) + 10_000 * n - 28_104) << (24 * (n - 10))
    return lhs <= rhs


def check_refined_binary32_bound() -> CheckReport:
    """The single-precision refinement (n - 2.8104)u holds for 10 <= n <= 2088.

    The constants 7.06 and 2.8104 enter as the exact rationals 706/100 and
    28104/10000; every comparison is an integer comparison.  Also probes
    n = 2089 and reports (informationally) whether the bound still holds
    just past the proved range.
    """
    checked = 0
    failures = []
    m_pow = 1
    step = (1 << 24) + 1
    for n in range(10, 2089):
        checked += 1
        if not _refined_binary32_holds(n, m_pow):
            failures.append(n)
        m_pow *= step
    boundary_holds = _refined_binary32_holds(2089, m_pow)
    return CheckReport(
        name="refined_binary32",
        passed=not failures,
        checked=checked,
        details={"failures": failures, "n2089_holds": boundary_holds},
    )
