"""Laguerre polynomials, derivatives at the origin, kernels and expansions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laguerre_sobolev.laguerre import (
    LaguerreExpansion,
    deriv_at_zero,
    eval_expansion,
    eval_L,
    eval_weighted,
    expansion_deriv_zero,
    kernel_deriv_zero,
    kernel_expansion,
    log_gamma,
    norm_sq_L,
    orthonormal_deriv_at_zero,
    recurrence_coeffs,
)

# mpmath.loggamma at 40 digits
LOGGAMMA = [
    (0.5, 0.57236494292470008707),
    (1.1, -0.049872441259839724148),
    (1.9, -0.038984275923083330039),
    (2.2, 0.096947466790638776492),
    (0.001, 6.9071788853838536825),
    (150.7, 603.51621557339253961),
    (1e-8, 18.420680738180208905),
]

# mpmath.laguerre(n, a, x)
LAGUERRE = [
    (0.5, 7, 3.2, -0.57148866355158730159),
    (-0.5, 20, 11.0, -20.110118931154162252),
    (1.0, 60, 0.3, 4.5280429479112561632),
    (0.0, 150, 400.0, 2.0446693046479611287e85),
]

# mpmath.diff of mpmath.laguerre at 0
DERIVS = [
    (0.5, 7, 2, 35.19140625),
    (-0.5, 12, 3, -113.4709014892578125),
    (2.0, 9, 0, 55.0),
]


class TestLogGamma:
    @pytest.mark.parametrize("x, expected", LOGGAMMA)
    def test_against_mpmath(self, x, expected):
        assert log_gamma(x) == pytest.approx(expected, rel=1e-14, abs=1e-15)

    def test_zeros_at_one_and_two(self):
        assert log_gamma(1.0) == 0.0
        assert log_gamma(2.0) == 0.0

    def test_rejects_poles(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)
        with pytest.raises(ValueError):
            log_gamma(-1.5)


class TestEvalL:
    def test_small_cases(self):
        assert eval_L(0.0, 2, 2.0) == pytest.approx(-1.0, abs=1e-15)
        assert eval_L(0.0, 0, 5.0) == 1.0
        assert eval_L(1.0, 1, 0.5) == pytest.approx(1.5)

    @pytest.mark.parametrize("alpha, n, x, expected", LAGUERRE)
    def test_against_mpmath(self, alpha, n, x, expected):
        assert eval_L(alpha, n, x) == pytest.approx(expected, rel=1e-12)

    def test_value_at_zero_is_binomial(self):
        for alpha in (-0.5, 0.0, 2.5):
            for n in (0, 3, 17):
                binom = math.exp(log_gamma(n + alpha + 1) - log_gamma(n + 1) - log_gamma(alpha + 1))
                assert eval_L(alpha, n, 0.0) == pytest.approx(binom, rel=1e-13)

    def test_vectorized(self):
        xs = np.array([0.1, 1.0, 7.5])
        vals = eval_L(0.5, 9, xs)
        assert vals.shape == (3,)
        assert vals[1] == pytest.approx(eval_L(0.5, 9, 1.0))

    def test_rejects_alpha(self):
        with pytest.raises(ValueError):
            eval_L(-1.0, 3, 1.0)


class TestDerivatives:
    @pytest.mark.parametrize("alpha, n, k, expected", DERIVS)
    def test_against_mpmath(self, alpha, n, k, expected):
        assert deriv_at_zero(alpha, n, k) == pytest.approx(expected, rel=1e-13)

    def test_simple(self):
        assert deriv_at_zero(0.0, 3, 1) == pytest.approx(-3.0)
        assert deriv_at_zero(0.5, 4, 5) == 0.0

    def test_finite_difference(self):
        h = 1e-4
        alpha, n = 0.7, 6
        fd = (eval_L(alpha, n, 2 * h) - 4 * eval_L(alpha, n, h) + 3 * eval_L(alpha, n, 0.0)) / (-2 * h)
        assert deriv_at_zero(alpha, n, 1) == pytest.approx(fd, rel=1e-6)

    def test_norm(self):
        assert norm_sq_L(0.5, 1) == pytest.approx(1.5)
        assert norm_sq_L(0.0, 40) == pytest.approx(1.0)

    def test_orthonormal_derivative(self):
        alpha, n, k = 1.5, 10, 2
        expected = deriv_at_zero(alpha, n, k) / math.sqrt(norm_sq_L(alpha, n))
        assert orthonormal_deriv_at_zero(alpha, n, k) == pytest.approx(expected, rel=1e-13)


class TestKernels:
    def test_small_value(self):
        assert kernel_deriv_zero(0.0, 1, 0, 0) == pytest.approx(2.0)

    def test_brute_force(self):
        alpha, n, k, h = 0.5, 30, 1, 2
        brute = math.fsum(orthonormal_deriv_at_zero(alpha, i, k) * orthonormal_deriv_at_zero(alpha, i, h)
                          for i in range(n + 1))
        assert kernel_deriv_zero(alpha, n, k, h) == pytest.approx(brute, rel=1e-13)
        assert kernel_deriv_zero(alpha, n, h, k) == kernel_deriv_zero(alpha, n, k, h)

    @given(st.floats(-0.9, 3.0), st.integers(0, 25), st.integers(0, 3),
           st.lists(st.floats(-1, 1), min_size=1, max_size=26))
    @settings(max_examples=40, deadline=None)
    def test_reproducing_property(self, alpha, n, h, coeffs):
        """<p, K_n^{(0,h)}(., 0)> = p^{(h)}(0) for deg p <= n."""
        c = np.zeros(n + 1)
        m = min(len(coeffs), n + 1)
        c[:m] = coeffs[:m]
        p = LaguerreExpansion(alpha, c)
        K = kernel_expansion(alpha, n, h)
        lhs = math.fsum(p.coeffs * K.coeffs)
        rhs = expansion_deriv_zero(p, h)
        scale = math.fsum(abs(c * K.coeffs)) + 1e-300
        assert abs(lhs - rhs) <= 1e-12 * scale


class TestExpansion:
    def test_basis_matches_eval_L(self):
        alpha, n = 0.5, 12
        xs = np.linspace(0, 40, 9)
        f = LaguerreExpansion.basis(alpha, n)
        np.testing.assert_allclose(f(xs), eval_L(alpha, n, xs) / math.sqrt(norm_sq_L(alpha, n)), rtol=1e-12, atol=1e-12)

    def test_clenshaw_against_direct_sum(self):
        rng = np.random.default_rng(7)
        alpha = 1.3
        c = rng.normal(size=15)
        f = LaguerreExpansion(alpha, c)
        xs = np.array([0.0, 0.7, 5.0, 20.0])
        direct = sum(ck * eval_L(alpha, k, xs) / math.sqrt(norm_sq_L(alpha, k)) for k, ck in enumerate(c))
        np.testing.assert_allclose(eval_expansion(f, xs), direct, rtol=1e-11, atol=1e-11)

    def test_arithmetic(self):
        f = LaguerreExpansion.basis(0.0, 2)
        g = LaguerreExpansion.basis(0.0, 4)
        h = 2.0 * f - g
        assert h.degree == 4
        assert h(1.5) == pytest.approx(2 * f(1.5) - g(1.5))

    def test_weighted_evaluation_large_x(self):
        """l_200(x) e^{-x/2} near the turning point, where l_200 itself overflows nothing but the weight underflows."""
        f = LaguerreExpansion.basis(0.0, 200)
        x = np.array([700.0, 790.0])
        vals = eval_weighted(f, x, -x / 2)
        direct = eval_L(0.0, 200, x) * np.exp(-x / 2)
        np.testing.assert_allclose(vals, direct, rtol=1e-9)

    def test_recurrence_coeffs(self):
        diag, off = recurrence_coeffs(0.5, 4)
        np.testing.assert_allclose(diag, [1.5, 3.5, 5.5, 7.5])
        np.testing.assert_allclose(np.abs(off), [math.sqrt(1.5), math.sqrt(5.0), math.sqrt(10.5)])

    @given(st.floats(-0.9, 4.0), st.integers(1, 60), st.floats(0.0, 50.0))
    @settings(max_examples=60, deadline=None)
    def test_three_term_recurrence(self, alpha, n, x):
        """(n+1) L_{n+1} = (2n+a+1-x) L_n - (n+a) L_{n-1}."""
        lhs = (n + 1) * eval_L(alpha, n + 1, x)
        rhs = (2 * n + alpha + 1 - x) * eval_L(alpha, n, x) - (n + alpha) * eval_L(alpha, n - 1, x)
        scale = abs((2 * n + alpha + 1 - x) * eval_L(alpha, n, x)) + abs((n + alpha) * eval_L(alpha, n - 1, x)) + 1.0
        assert abs(lhs - rhs) <= 1e-11 * scale
