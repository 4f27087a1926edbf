import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decompq import special
from decompq.errors import QuadratureError, ValidationError

from oracles import binom_cdf_half_exact, mp_hyp2f1


class TestTerminatingHypergeometric:
    @pytest.mark.parametrize("p, b, c, z", [
        (0, 2.0, 3.0, 0.4), (1, 1.0, 2.0, 0.5), (5, 3.0, 4.0, 0.9),
        (20, 1.0, 2.0, 0.999), (40, 7.0, 8.0, 0.3), (100, 50.0, 51.0, 0.75),
    ])
    def test_against_mpmath(self, p, b, c, z):
        assert special.hyp2f1_terminating(p, b, c, z) == pytest.approx(
            mp_hyp2f1(-p, b, c, z), rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 60), st.integers(0, 40), st.floats(0.01, 1.0))
    def test_cap_parameters(self, p, q, z):
        # the family F(-p, q+1; q+2; z) that builds the cap spectrum
        ref = mp_hyp2f1(-p, q + 1, q + 2, z)
        assert special.hyp2f1_terminating(p, q + 1, q + 2, z) == pytest.approx(ref, rel=1e-11, abs=1e-300)

    def test_negative_argument_uses_series(self):
        # F(-3, b; b; x) = (1 - x)^3
        assert special.hyp2f1_terminating(3, 2.5, 2.5, -0.7) == pytest.approx(1.7 ** 3, rel=1e-15)

    def test_small_closed_form(self):
        # F(-2, 1; 2; z) = 1 - z + z^2/3
        assert special.hyp2f1_terminating(2, 1.0, 2.0, 0.5) == pytest.approx(7 / 12, rel=1e-15)

    def test_series_matches_when_well_conditioned(self):
        for p in range(8):
            assert special.hyp2f1_series(p, 2.0, 3.0, 0.3) == pytest.approx(
                special.hyp2f1_terminating(p, 2.0, 3.0, 0.3), rel=1e-13)

    def test_alternating_series_loses_accuracy(self):
        # large p near z = 1: the plain series cancels badly, the transformed sum does not
        ref = mp_hyp2f1(-60, 3, 4, 0.98)
        assert special.hyp2f1_terminating(60, 3.0, 4.0, 0.98) == pytest.approx(ref, rel=1e-12)
        assert abs(special.hyp2f1_series(60, 3.0, 4.0, 0.98) / ref - 1) > 1e-6

    def test_validation(self):
        with pytest.raises(ValidationError):
            special.hyp2f1_terminating(-1, 1.0, 2.0, 0.5)
        with pytest.raises(ValidationError):
            special.hyp2f1_terminating(2.5, 1.0, 2.0, 0.5)
        with pytest.raises(ValidationError):
            special.hyp2f1_terminating(2, 1.0, -3.0, 0.5)


class TestHypAtMinusOne:
    def test_against_mpmath(self):
        with mpmath.workdps(40):
            for a in range(2, 31):
                for b in range(1, a):
                    ref = float(mpmath.hyp2f1(a, b, b + 1, -1))
                    assert special.hyp_at_minus_one(a, b) == pytest.approx(ref, rel=1e-14)

    def test_known_value(self):
        assert special.hyp_at_minus_one(3, 1) == 0.375

    def test_b_equals_one_closed_form(self):
        for a in range(2, 25):
            assert special.hyp_at_minus_one_b1(a) == pytest.approx(special.hyp_at_minus_one(a, 1), rel=1e-15)
        assert special.hyp_at_minus_one_b1(1) == pytest.approx(math.log(2))

    def test_contiguous_recurrence(self):
        for a in range(3, 31):
            for b in range(2, a):
                lhs = special.hyp_at_minus_one(a, b)
                rhs = (special.gauss_alpha(a, b) * special.hyp_at_minus_one(a, b - 1)
                       + special.gauss_beta(a, b))
                assert abs(lhs - rhs) <= 1e-10

    def test_validation(self):
        with pytest.raises(ValidationError):
            special.hyp_at_minus_one(3, 3)
        with pytest.raises(ValidationError):
            special.hyp_at_minus_one(3, 0)


class TestBinomial:
    @pytest.mark.parametrize("n", [1, 2, 7, 50, 301])
    def test_cdf_exact(self, n):
        for y in range(0, n + 1, max(1, n // 10)):
            assert special.binom_cdf_half(y, n) == float(binom_cdf_half_exact(y, n))

    def test_large_n_log_domain(self):
        n = 5001
        for y in (2300, 2500, 2700):
            assert special.binom_cdf_half(y, n) == pytest.approx(float(binom_cdf_half_exact(y, n)), rel=1e-11)

    def test_symmetry(self):
        # P(X <= y) + P(X <= n - 1 - y) = 1 for p = 1/2
        for n in (5, 30, 101):
            for y in range(n):
                assert special.binom_cdf_half(y, n) + special.binom_cdf_half(n - 1 - y, n) == pytest.approx(1.0, abs=1e-15)

    def test_log_comb(self):
        assert math.exp(special.log_comb(10, 3)) == pytest.approx(120)
        big = special.log_comb(10000, 5000)
        assert big == pytest.approx(float(mpmath.log(mpmath.binomial(10000, 5000))), rel=1e-14)
        with pytest.raises(ValidationError):
            special.log_comb(3, 4)


class TestQuadrature:
    def test_polynomial_exact(self):
        assert special.adaptive_gauss_legendre(lambda x: x ** 5, 0.0, 2.0) == pytest.approx(64 / 6, rel=1e-15)

    def test_against_mpmath(self):
        for p, q, th in [(0, 0, 1.0), (3, 5, 2.0), (10, 2, 0.4), (12, 12, math.pi)]:
            with mpmath.workdps(30):
                ref = float(mpmath.quad(lambda t: mpmath.cos(t) ** (2 * p + 1) * mpmath.sin(t) ** (2 * q + 1),
                                        [0, th / 2]))
            assert special.lambda_quadrature(p, q, th) == pytest.approx(ref, rel=1e-12, abs=1e-16)

    def test_full_interval(self):
        assert special.lambda_full(2, 3) == pytest.approx(1 / 120, rel=1e-15)
        for p in range(6):
            for q in range(6):
                assert special.lambda_quadrature(p, q, math.pi) == pytest.approx(special.lambda_full(p, q), rel=1e-12)

    def test_closed_form_matches_quadrature(self):
        for p in range(8):
            for q in range(8):
                for th in (0.3, 1.5, 2.9):
                    assert special.lambda_closed(p, q, th) == pytest.approx(
                        special.lambda_quadrature(p, q, th), rel=1e-11, abs=1e-18)

    def test_reflection(self):
        for p in range(6):
            for q in range(6):
                for th in (0.5, math.pi / 2, 2.2):
                    total = special.lambda_quadrature(p, q, th) + special.lambda_quadrature(q, p, math.pi - th)
                    assert total == pytest.approx(special.lambda_full(p, q), abs=1e-14)

    def test_non_convergence_raises(self):
        with pytest.raises(QuadratureError):
            special.adaptive_gauss_legendre(lambda x: np.sign(x - 0.3), 0.0, 1.0, max_depth=3)

    def test_validation(self):
        with pytest.raises(ValidationError):
            special.lambda_quadrature(1, 1, 4.0)
