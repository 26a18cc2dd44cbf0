"""Gauss-Laguerre rules and weighted L_p / S_p norms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laguerre_sobolev.laguerre import LaguerreExpansion
from laguerre_sobolev.norms import (
    BetaMode,
    DomainError,
    build_quadrature,
    check_admissible,
    lp_norm,
    norm_growth,
    norm_growth_exponent,
    pollard_endpoints,
    probability_p_mean,
    sobolev_space_norm,
)
from laguerre_sobolev.sobolev import SobolevProduct, build_stagewise

# (int |l_n^a e^{-x/2}|^p x^beta dx)^{1/p}: mpmath.quad split at the zeros, 40 digits
LP = [
    (0.0, 3, 3.0, "alpha", 0.68495338374093204739),
    (0.5, 5, 2.5, "alpha", 0.66412549418860343768),
    (1.0, 4, 3.0, "palpha2", 0.64032240386255977421),
    (0.5, 6, 5.0, "alpha", 0.64153626054167130467),
]

# sup |l_n^a e^{-x/2}| (times x^{a/2} in the second mode), mpmath scan plus root of the derivative
SUP = [
    (0.0, 10, "alpha", 1.0),
    (1.0, 8, "palpha2", 0.58211936661257524088),
]


class TestQuadrature:
    def test_one_point(self):
        r = build_quadrature(0.0, 1)
        np.testing.assert_allclose(r.nodes, [1.0])
        np.testing.assert_allclose(r.weights, [1.0])

    def test_two_point(self):
        r = build_quadrature(0.0, 2)
        np.testing.assert_allclose(r.nodes, [2 - math.sqrt(2), 2 + math.sqrt(2)], rtol=1e-14)
        np.testing.assert_allclose(r.weights, [(2 + math.sqrt(2)) / 4, (2 - math.sqrt(2)) / 4], rtol=1e-14)
        for m, moment in enumerate([1, 1, 2, 6]):
            assert r.integrate(r.nodes**m) == pytest.approx(moment, rel=1e-14)

    def test_zeroth_moment(self):
        r = build_quadrature(1.5, 200)
        assert r.weights.sum() == pytest.approx(math.gamma(2.5), rel=1e-12)

    @given(st.floats(-0.95, 4.0), st.integers(1, 40))
    @settings(max_examples=40, deadline=None)
    def test_moment_exactness(self, gamma, m):
        r = build_quadrature(gamma, m)
        for k in (0, m, 2 * m - 1):
            exact = math.exp(math.lgamma(gamma + k + 1))
            assert r.integrate(r.nodes**k) == pytest.approx(exact, rel=1e-12)

    def test_large_rule_log_weights(self):
        r = build_quadrature(0.0, 2048)
        assert np.all(np.isfinite(r.log_weights))
        assert math.fsum(np.exp(r.log_weights)) == pytest.approx(1.0, rel=1e-12)
        assert np.all(np.diff(r.nodes) > 0)

    def test_rejects(self):
        with pytest.raises(ValueError):
            build_quadrature(-1.0, 4)
        with pytest.raises(ValueError):
            build_quadrature(0.0, 0)


class TestAdmissibility:
    def test_modes(self):
        assert BetaMode.parse("beta_alpha") is BetaMode.ALPHA
        assert BetaMode.parse("beta_p_alpha_over_2") is BetaMode.PALPHA2
        with pytest.raises(ValueError):
            BetaMode.parse("other")

    def test_palpha2_domain(self):
        check_admissible(0.0, math.inf, BetaMode.PALPHA2)
        with pytest.raises(DomainError):
            check_admissible(-0.1, math.inf, BetaMode.PALPHA2)
        with pytest.raises(DomainError):
            check_admissible(-0.5, 4.0, BetaMode.PALPHA2)
        with pytest.raises(DomainError):
            check_admissible(0.0, 0.5, BetaMode.ALPHA)

    def test_pollard_endpoints(self):
        assert pollard_endpoints(0.0, "alpha") == pytest.approx((4 / 3, 4))
        assert pollard_endpoints(0.5, "alpha") == pytest.approx((1.5, 3))
        assert pollard_endpoints(2.0, "palpha2") == pytest.approx((4 / 3, 4))
        with pytest.raises(DomainError):
            pollard_endpoints(-0.5, "alpha")


class TestLpNorm:
    def test_constant(self):
        one = LaguerreExpansion(0.0, np.array([1.0]))
        assert lp_norm(one, 2, "alpha") == pytest.approx(1.0, rel=1e-12)
        assert lp_norm(one, 2, "alpha", normalized=True) == pytest.approx(1.0, rel=1e-12)

    def test_orthonormal_l2(self):
        for alpha in (0.5, 2.0):
            f = LaguerreExpansion.basis(alpha, 37)
            assert lp_norm(f, 2, "alpha") == pytest.approx(math.sqrt(math.gamma(alpha + 1)), rel=1e-12)
            assert lp_norm(f, 2, "alpha", normalized=True) == pytest.approx(1.0, rel=1e-12)

    def test_classical_l2_constant(self):
        vals = [lp_norm(LaguerreExpansion.basis(0.0, n), 2, "alpha") for n in range(25, 201, 25)]
        np.testing.assert_allclose(vals, 1.0, atol=1e-8)

    @pytest.mark.parametrize("alpha, n, p, mode, expected", LP)
    def test_against_mpmath(self, alpha, n, p, mode, expected):
        assert lp_norm(LaguerreExpansion.basis(alpha, n), p, mode) == pytest.approx(expected, rel=1e-7)

    @pytest.mark.parametrize("alpha, n, mode, expected", SUP)
    def test_sup_against_mpmath(self, alpha, n, mode, expected):
        assert lp_norm(LaguerreExpansion.basis(alpha, n), math.inf, mode) == pytest.approx(expected, rel=1e-9)

    def test_even_p_substitution(self):
        """Even p is exact after t = p x / 2; value from mpmath.quad at 30 digits."""
        f = LaguerreExpansion.basis(0.5, 8)
        assert lp_norm(f, 4, "alpha") == pytest.approx(0.541947832453716590476, rel=1e-12)

    def test_negligible_leading_coefficient(self):
        f = LaguerreExpansion(0.0, np.array([0.5, -1.0, 1e-128]))
        g = LaguerreExpansion(0.0, np.array([0.5, -1.0]))
        assert lp_norm(f, 1, "alpha") == pytest.approx(lp_norm(g, 1, "alpha"), rel=1e-9)

    def test_root_near_origin(self):
        """(x - 1e-9) L_5^0 in the l^0 basis; value from mpmath.quad split at the zeros."""
        c = np.zeros(7)
        c[4], c[5], c[6] = -5.0, 11.0 - 1e-9, -6.0
        f = LaguerreExpansion(0.0, c)
        assert lp_norm(f, 3, "alpha") == pytest.approx(8.6526518464883416593, rel=1e-10)

    def test_sup_bounded_classical(self):
        vals = [lp_norm(LaguerreExpansion.basis(0.0, n), math.inf, "alpha") for n in range(25, 201, 25)]
        np.testing.assert_allclose(vals, 1.0, rtol=1e-12)

    def test_holder_monotone(self):
        cache = build_stagewise(SobolevProduct(0.5, (1.0, 0.0, 1.0)), 40)
        for n in (5, 20, 40):
            means = [probability_p_mean(cache.q(n), p) for p in (1, 2, 4, 6)]
            assert all(a <= b * (1 + 1e-9) for a, b in zip(means, means[1:]))

    @given(st.lists(st.floats(-1, 1), min_size=2, max_size=12), st.floats(1.0, 6.0))
    @settings(max_examples=20, deadline=None)
    def test_holder_property(self, coeffs, p):
        c = np.array(coeffs)
        if np.max(np.abs(c)) < 1e-3:
            c[0] = 1.0
        f = LaguerreExpansion(0.0, c)
        assert probability_p_mean(f, p) <= probability_p_mean(f, p + 1) * (1 + 1e-8)


class TestSobolevSpaceNorm:
    def test_no_masses(self):
        f = LaguerreExpansion.basis(0.5, 7)
        S = SobolevProduct(0.5, (0.0,))
        assert sobolev_space_norm(f, 3, "alpha", S) == lp_norm(f, 3, "alpha")

    def test_constant_sup(self):
        c = 2.5
        f = LaguerreExpansion(0.0, np.array([c]))
        S = SobolevProduct(0.0, (1.0,))
        assert sobolev_space_norm(f, math.inf, "alpha", S) == pytest.approx(max(lp_norm(f, math.inf, "alpha"), c))

    def test_finite_p_adds_masses(self):
        f = LaguerreExpansion.basis(0.0, 3)  # f(0) = 1, f'(0) = -3
        S = SobolevProduct(0.0, (2.0, 1.0))
        base = lp_norm(f, 2, "alpha")
        assert sobolev_space_norm(f, 2, "alpha", S) == pytest.approx(math.sqrt(base**2 + 2 * 1 + 1 * 9))


class TestNormGrowth:
    def test_exponents(self):
        assert norm_growth_exponent(0.0, math.inf, "alpha") == 0.0
        assert norm_growth_exponent(1.0, 8.0, "alpha") == pytest.approx(0.5 - 0.25)
        assert norm_growth_exponent(3.0, 6.0, "palpha2") == pytest.approx(-1 / 6)

    def test_slopes(self):
        cache = build_stagewise(SobolevProduct(0.0, ()), 200)
        r = norm_growth(cache, math.inf, "alpha")
        assert abs(r.slope) < 0.1
        r = norm_growth(cache, 6, "palpha2")
        assert r.slope == pytest.approx(-1 / 6, abs=0.1)
        assert r.as_dict()["convention"].startswith("unnormalized")

    def test_log_case(self):
        cache = build_stagewise(SobolevProduct(0.0, ()), 200)
        r = norm_growth(cache, 4, "alpha")
        assert r.log_case
        assert r.log_correlation > 0.99
