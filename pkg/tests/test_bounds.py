from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ulplab import (
    alpha,
    alpha_below_limit,
    alpha_exceeds_beta,
    beta,
    bound_set,
    check_lemma2,
    check_property1,
    check_refined_binary32_bound,
    n_max,
    threshold_constants,
    to_decimal,
    unit_roundoff,
)

ENCLOSURE_WIDTH = Fraction(1, 1 << 80)


class TestBoundSet:
    def test_gamma_p8_n3(self):
        b = bound_set(8, 3)
        # gamma_2 in ulps is 2/(1 - 2**-7) = 256/127
        assert b.gamma / b.u == Fraction(256, 127)
        assert to_decimal(b.gamma / b.u, 4) == "2.0157"

    def test_gamma_p9_n11(self):
        b = bound_set(9, 11)
        assert to_decimal(b.gamma / b.u, 3) == "10.199"

    def test_n2_degenerate(self):
        b = bound_set(16, 2)
        assert b.simple == b.u
        assert b.psi == b.u
        assert b.gamma == b.u / (1 - b.u)

    def test_gamma_undefined(self):
        with pytest.raises(ValueError):
            bound_set(4, 17)  # (n-1)u = 1

    @given(
        p=st.integers(min_value=5, max_value=64),
        n=st.integers(min_value=2, max_value=500),
    )
    def test_ordering(self, n, p):
        if (n - 1) >= (1 << p):
            with pytest.raises(ValueError):
                bound_set(p, n)
            return
        b = bound_set(p, n)
        assert b.simple <= b.psi <= b.gamma
        assert b.refined_unit == b.u / (1 + b.u)

    def test_unit_roundoff(self):
        assert unit_roundoff(24) == Fraction(1, 1 << 24)
        with pytest.raises(ValueError):
            unit_roundoff(1)


class TestNMax:
    @pytest.mark.parametrize(
        "p,expected",
        [(24, 2088), (53, 48385542), (113, 51953580258461959)],
    )
    def test_reference_values(self, p, expected):
        assert n_max(p) == expected

    def test_requires_p_at_least_5(self):
        with pytest.raises(ValueError):
            n_max(4)

    @pytest.mark.parametrize("p", [5, 6, 7, 8, 11, 24, 31, 53, 64, 113])
    def test_defining_inequality(self, p):
        # n_max is the largest n with n**2 * 2**-p <= 2**(1/3) - 1,
        # equivalently (n**2 + 2**p)**3 <= 2**(3p+1) in integers
        n = n_max(p)
        assert (n * n + (1 << p)) ** 3 <= 1 << (3 * p + 1)
        m = n + 1
        assert (m * m + (1 << p)) ** 3 > 1 << (3 * p + 1)


class TestEnclosures:
    def test_beta_digits(self):
        enc = beta()
        assert enc.width <= ENCLOSURE_WIDTH
        # both ends agree on the quoted digits
        assert to_decimal(enc.lo, 13) == "0.5098245285339"
        assert to_decimal(enc.hi, 13) == "0.5098245285339"

    def test_alpha5_digits(self):
        enc = alpha(5)
        assert enc.width <= ENCLOSURE_WIDTH
        assert to_decimal(enc.lo, 5) == "0.74509"
        assert to_decimal(enc.hi, 5) == "0.74509"

    def test_alpha_monotone_in_p(self):
        assert alpha(6).lo > alpha(5).hi

    def test_alpha_below_limit(self):
        # the limit is sqrt(2**(2/3) - 1) = 0.7664209...
        for p in (5, 8, 24, 53, 113, 120):
            assert alpha_below_limit(p)
        big = alpha(120)
        assert to_decimal(big.lo, 7) == "0.7664209"

    def test_alpha_exceeds_beta_over_range(self):
        for p in range(5, 121):
            assert alpha_exceeds_beta(p)

    def test_threshold_constants_bundle(self):
        tc = threshold_constants(24)
        assert tc.n_max == 2088
        assert tc.alpha.lo > tc.beta.hi
        assert tc.alpha.width <= ENCLOSURE_WIDTH
        assert tc.beta.width <= ENCLOSURE_WIDTH

    def test_enclosures_shrink_with_bits(self):
        assert beta(120).width < beta(80).width
        assert beta(120).lo >= beta(80).lo
        assert beta(120).hi <= beta(80).hi


class TestPropertyChecks:
    def test_property1(self):
        report = check_property1()
        assert report.passed
        assert report.checked >= 3 * 50
        assert not report.details["failures"]
        # the k = 4 failure is real and was actually found
        u = Fraction(report.details["k4_counterexample_u"])
        assert (1 + u / (1 + u)) ** 4 >= 1 + 4 * u

    def test_property1_k2_closed_form(self):
        # (1 + u/(1+u))**2 - (1 + 2u) = -u**2 (1+2u)/(1+u)**2, negative
        u = Fraction(1, 256)
        lhs = (1 + u / (1 + u)) ** 2 - (1 + 2 * u)
        assert lhs == -(u**2) * (1 + 2 * u) / (1 + u) ** 2
        assert lhs < 0

    def test_lemma2_default_grid(self):
        report = check_lemma2()
        assert report.passed
        assert report.checked > 100

    def test_lemma2_endpoint_exact(self):
        # boundary u = 2/(3 n**2) must be included and hold
        n = 100
        u = Fraction(2, 3 * n * n)
        lhs = (1 + u) ** (n - 2) * (1 + u / (1 + n * n * u))
        assert lhs <= 1 + (n - 1) * u

    def test_lemma2_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            check_lemma2(n_grid=[2])

    def test_refined_binary32(self):
        report = check_refined_binary32_bound()
        assert report.passed
        assert report.checked == 2079  # n = 10 .. 2088
        assert not report.details["failures"]
        assert isinstance(report.details["n2089_holds"], bool)

    def test_refined_binary32_endpoint_by_hand(self):
        # n = 10: lhs is exactly 7.06u and the bound is 7.1896u
        u = Fraction(1, 1 << 24)
        lhs = (1 + Fraction(706, 100) * u) * (1 + u) ** 0 - 1
        assert lhs == Fraction(706, 100) * u
        assert lhs <= (10 - Fraction(28104, 10000)) * u
