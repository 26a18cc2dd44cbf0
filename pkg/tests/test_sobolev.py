"""Discrete Sobolev products, orthonormal bases and connection coefficients."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laguerre_sobolev.laguerre import LaguerreExpansion, eval_expansion, expansion_deriv_zero, norm_sq_L
from laguerre_sobolev.sobolev import (
    SobolevBasisCache,
    SobolevProduct,
    build_gram_oracle,
    build_stagewise,
    connection_coeffs,
    q_deriv_ratio,
    representation_residual,
    sobolev_inner,
)

# q_6 in the l^a basis and <Q_6,Q_6>_S from 50-digit Gram-Schmidt (mpmath)
GRAM_SCHMIDT = [
    (0.5, (1.0, 0.0, 1.0),
     [0.15060847507457091, 0.18445695743568869, 0.12775748637739962, -0.03152430652991495,
      -0.30313832291879458, -0.69508825948016988, 0.56276783729987093], 9.2596983121255184),
    (0.0, (2.0,),
     [-0.14322297480788658] * 6 + [0.93094933625126274], 1.1538461538461538),
    (-0.5, (0.5, 0.0, 0.0, 2.0),
     [0.090108679472061554, 0.063716458298459776, 0.055180071525637974, -0.04436655418590868,
      -0.30736131424174691, -0.79602281358448804, 0.48687015547163283], 0.95166854696902142),
]

# <Q_n,Q_n>_S / ||L_n||^2 - 1 = v^T (A^{-1} + K)^{-1} v at 60 digits (mpmath)
NORM_RATIO = [
    (1.0, (0.5, 0.0, 0.0, 2.0), 50, 0.222184489647),
    (1.0, (0.5, 0.0, 0.0, 2.0), 200, 0.0513094707852),
    (0.0, (1.0, 0.0, 1.0), 200, 0.0304184666438),
    (0.5, (1.0, 1.0), 200, 0.0251979163722),
]

masses_st = st.lists(st.sampled_from([0.0, 0.5, 1.0, 3.0]), min_size=0, max_size=4)


class TestProduct:
    def test_indices(self):
        S = SobolevProduct(0.0, (1.0, 0.0, 2.0))
        assert S.N == 2
        assert S.positive == (0, 2)
        assert S.first_gap == 1
        assert SobolevProduct(0.0, (1.0, 1.0)).first_gap == 2
        assert SobolevProduct(0.0).N == -1

    def test_rejects(self):
        with pytest.raises(ValueError):
            SobolevProduct(-1.0, (1.0,))
        with pytest.raises(ValueError):
            SobolevProduct(0.0, (-1.0,))

    def test_inner_product_terms(self):
        S = SobolevProduct(0.0, (2.0,))
        f = LaguerreExpansion.basis(0.0, 1)
        # l_1^0 = 1 - x: ||f||^2 = 1, f(0) = 1
        assert sobolev_inner(f, f, S) == pytest.approx(3.0)


class TestConstruction:
    @pytest.mark.parametrize("alpha, masses, q6, nsq6", GRAM_SCHMIDT)
    def test_against_gram_schmidt(self, alpha, masses, q6, nsq6):
        cache = build_stagewise(SobolevProduct(alpha, masses), 6)
        np.testing.assert_allclose(cache.coeffs[6, :7], q6, atol=1e-14)
        assert cache.norm_sq_Q[6] == pytest.approx(nsq6, rel=1e-13)

    @pytest.mark.parametrize("alpha, masses, n, expected", NORM_RATIO)
    def test_norm_ratio_oracle(self, alpha, masses, n, expected):
        cache = build_stagewise(SobolevProduct(alpha, masses), n)
        assert cache.norm_sq_Q[n] / norm_sq_L(alpha, n) - 1 == pytest.approx(expected, rel=1e-10)

    def test_no_masses_is_identity(self):
        cache = build_stagewise(SobolevProduct(0.5, ()), 40)
        np.testing.assert_allclose(cache.coeffs, np.eye(41), rtol=0, atol=1e-15)

    def test_zero_masses_is_identity(self):
        cache = build_stagewise(SobolevProduct(0.5, (0.0, 0.0)), 20)
        np.testing.assert_allclose(cache.coeffs, np.eye(21), atol=1e-15)

    def test_oracle_agreement(self):
        S = SobolevProduct(-0.5, (0.5, 0.0, 0.0, 2.0))
        a = build_stagewise(S, 120)
        b = build_gram_oracle(S, 120)
        assert np.max(np.abs(a.coeffs - b.coeffs)) < 1e-12

    def test_positive_leading_coefficient(self):
        cache = build_stagewise(SobolevProduct(1.0, (1.0, 1.0)), 30)
        assert np.all(np.diag(cache.coeffs) > 0)

    def test_carried_derivatives_match_direct_sum(self):
        cache = build_stagewise(SobolevProduct(0.0, (1.0, 0.0, 1.0)), 12)
        for n in range(13):
            plain = LaguerreExpansion(0.0, cache.coeffs[n, : n + 1])
            for k in range(3):
                assert cache.derivs[n, k] == pytest.approx(expansion_deriv_zero(plain, k), rel=1e-9, abs=1e-12)

    @given(st.floats(-0.9, 3.0), masses_st)
    @settings(max_examples=25, deadline=None)
    def test_orthonormal_property(self, alpha, masses):
        cache = build_stagewise(SobolevProduct(alpha, tuple(masses)), 25)
        G = np.array([[sobolev_inner(cache.q(i), cache.q(j), cache.product) for j in range(26)]
                      for i in range(26)])
        assert np.max(np.abs(G - np.eye(26))) < 1e-10

    @given(st.floats(-0.9, 3.0), masses_st)
    @settings(max_examples=15, deadline=None)
    def test_stagewise_matches_oracle_property(self, alpha, masses):
        S = SobolevProduct(alpha, tuple(masses))
        assert np.max(np.abs(build_stagewise(S, 30).coeffs - build_gram_oracle(S, 30).coeffs)) < 1e-11


class TestSerialization:
    def test_round_trip(self):
        cache = build_stagewise(SobolevProduct(0.5, (1.0, 0.0, 1.0)), 15)
        back = SobolevBasisCache.from_json(cache.to_json())
        np.testing.assert_array_equal(back.coeffs, cache.coeffs)
        np.testing.assert_array_equal(back.norm_sq_Q, cache.norm_sq_Q)
        np.testing.assert_array_equal(back.derivs, cache.derivs)
        assert back.product == cache.product

    def test_rejects_foreign_document(self):
        with pytest.raises(ValueError):
            SobolevBasisCache.from_json('{"format": "other"}')


class TestConnection:
    def test_representation_residual(self):
        cache = build_stagewise(SobolevProduct(0.0, (1.0, 0.0, 1.0)), 80)
        for n in (4, 40, 80):
            assert representation_residual(cache, n) < 1e-10

    def test_representation_pointwise(self):
        """q_n(x) = sum_j b_j x^j l_{n-j}^{a+2j}(x) at a few points."""
        alpha = 0.5
        cache = build_stagewise(SobolevProduct(alpha, (1.0, 1.0)), 20)
        n = 20
        b = connection_coeffs(cache, n)
        xs = np.array([0.3, 2.0, 9.0])
        rep = sum(bj * xs**j * eval_expansion(LaguerreExpansion.basis(alpha + 2 * j, n - j), xs)
                  for j, bj in enumerate(b))
        np.testing.assert_allclose(rep, eval_expansion(cache.q(n), xs), rtol=1e-10)

    def test_no_masses(self):
        cache = build_stagewise(SobolevProduct(1.0, ()), 10)
        b = connection_coeffs(cache, 10)
        np.testing.assert_allclose(b, [1.0])

    def test_deriv_ratio_no_masses(self):
        cache = build_stagewise(SobolevProduct(1.0, ()), 10)
        assert q_deriv_ratio(cache, 0, 10) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            q_deriv_ratio(cache, 3, 10)

    def test_deriv_ratio_decays_at_mass(self):
        cache = build_stagewise(SobolevProduct(0.0, (1.0,)), 200)
        r100 = q_deriv_ratio(cache, 0, 100)
        r200 = q_deriv_ratio(cache, 0, 200)
        assert r100 / r200 == pytest.approx(2.0, rel=0.05)
