"""Test functions, Sobolev-Fourier coefficients and Cohen-type lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .laguerre import (
    LaguerreExpansion,
    deriv_at_zero,
    deriv_scale,
    eval_weighted,
    expansion_deriv_zero,
    log_gamma,
    norm_sq_L,
    weighted_table,
)
from .norms import BetaMode, DomainError, build_quadrature, check_admissible, lp_norm, pollard_endpoints
from .sobolev import NumericalFailure, SobolevBasisCache, SobolevProduct, sobolev_inner

__all__ = [
    "CoefficientFamily",
    "PARTIAL_SUMS",
    "TestFunction",
    "choose_j",
    "build_test_function",
    "fourier_coeff",
    "g_hat_exact",
    "apply_T",
    "cohen_lower_bound",
    "cohen_exponent",
    "pollard_endpoints",
]


@dataclass(frozen=True)
class CoefficientFamily:
    """Multipliers c_{k,n} of T_n f = sum_{k<=n} c_{k,n} f^(k) q_k."""

    func: Callable[[int, int], complex]
    name: str = "custom"

    def __call__(self, k: int, n: int):
        return self.func(k, n)


PARTIAL_SUMS = CoefficientFamily(lambda k, n: 1.0, "partial sums")


@dataclass(frozen=True)
class TestFunction:
    n: int
    j: int
    expansion: LaguerreExpansion


def choose_j(alpha: float, N: int, p: float) -> int:
    """Smallest j >= N+1 with j > alpha - 1/2 - 2(alpha+1)/p."""
    bound = alpha - 0.5 - (0.0 if math.isinf(p) else 2 * (alpha + 1) / p)
    j = max(N + 1, 0)
    while not j > bound:
        j += 1
    return j


def _test_function_derivs(alpha: float, n: int, j: int, kappa: float, count: int) -> np.ndarray:
    """g^{(i)}(0) for i < count, exactly: g = x^j h with h = L_n^{a+j} - kappa L_{n+2}^{a+j}."""
    out = np.zeros(count)
    for i in range(j, count):
        h = deriv_at_zero(alpha + j, n, i - j) - kappa * deriv_at_zero(alpha + j, n + 2, i - j)
        out[i] = math.factorial(i) / math.factorial(i - j) * h
    return out


def build_test_function(alpha: float, S: SobolevProduct, n: int, j: int) -> TestFunction:
    """g_n^{a,j}(x) = x^j [L_n^{a+j} - sqrt((n+1)(n+2)/((n+a+j+1)(n+a+j+2))) L_{n+2}^{a+j}].

    The l^a expansion is obtained by Gauss projection with a rule exact for
    the degree 2(n+j+2) products.  g^{(i)}(0) = 0 for i <= N is checked on the
    expansion itself.
    """
    if alpha != S.alpha:
        raise ValueError("alpha differs from the product's")
    if j < S.N + 1:
        raise ValueError(f"j must be at least N+1 = {S.N + 1} so that g^(i)(0) = 0 for i <= N")
    if n < 0:
        raise ValueError("n must be nonnegative")
    gam = alpha + j
    kappa = math.sqrt((n + 1) * (n + 2) / ((n + gam + 1) * (n + gam + 2)))
    deg = n + j + 2
    inner = np.zeros(n + 3)
    inner[n] = math.sqrt(norm_sq_L(gam, n))
    inner[n + 2] = -kappa * math.sqrt(norm_sq_L(gam, n + 2))
    h = LaguerreExpansion(gam, inner)

    rule = build_quadrature(alpha, deg + 1)
    t = rule.nodes
    # w_i g(t_i) l_k(t_i) = exp(log w_i + t_i) (g e^{-t/2}) (l_k e^{-t/2})
    g_vals = eval_weighted(h, t, -t / 2 + j * np.log(t))
    basis = weighted_table(alpha, deg, t, -t / 2)
    coeffs = basis @ (np.exp(rule.log_weights + t) * g_vals) / math.gamma(alpha + 1)
    derivs = _test_function_derivs(alpha, n, j, kappa, max(S.N + 2, 1))
    g = LaguerreExpansion(alpha, coeffs, derivs)

    for i in range(S.N + 1):
        raw = expansion_deriv_zero(LaguerreExpansion(alpha, coeffs), i)
        scale = deriv_scale(g, i)
        if abs(raw) > 1e-9 * scale:
            raise NumericalFailure(f"g_{n}^(a,{j}) has derivative {i} = {raw:.3e} at 0 (scale {scale:.3e})")
    return TestFunction(n, j, g)


def fourier_coeff(f: LaguerreExpansion, k: int, cache: SobolevBasisCache):
    """<f, q_k>_S."""
    if k > cache.n_max:
        raise ValueError("k exceeds the cache")
    return sobolev_inner(f, cache.q(k), cache.product)


def g_hat_exact(alpha: float, n: int, j: int, cache: SobolevBasisCache) -> float:
    """<g_n^{a,j}, q_n>_S = a_{0,j} ||L_n||^2 / <Q_n, Q_n>_S^{1/2}, a_{0,j} = Gamma(n+a+j+1)/Gamma(n+a+1)."""
    a0 = math.exp(log_gamma(n + alpha + j + 1) - log_gamma(n + alpha + 1))
    return a0 * norm_sq_L(alpha, n) / math.sqrt(cache.norm_sq_Q[n])


def apply_T(f: LaguerreExpansion, c: CoefficientFamily, n: int, cache: SobolevBasisCache) -> LaguerreExpansion:
    """T_n f = sum_{k<=n} c_{k,n} <f, q_k>_S q_k."""
    if n > cache.n_max:
        raise ValueError("n exceeds the cache")
    out = 0.0 * cache.q(n)
    for k in range(n + 1):
        w = c(k, n) * fourier_coeff(f, k, cache)
        if w != 0:
            out = out + w * cache.q(k)
    return out


def cohen_exponent(alpha: float, p: float, mode) -> float:
    """Growth exponent of the Cohen lower bound for q_0 < p <= inf."""
    mode = BetaMode.parse(mode)
    inv = 0.0 if math.isinf(p) else 1.0 / p
    if mode is BetaMode.ALPHA:
        return (2 * alpha + 1) / 2 - (2 * alpha + 2) * inv
    return 0.5 - 2 * inv


def cohen_lower_bound(n: int, j: int | None, p: float, mode, c: CoefficientFamily, cache: SobolevBasisCache,
                      *, detail: bool = False):
    """|c_{n,n}| |g^(n)| ||q_n||_{L_p(x^beta)} / ||g||_{S_p^beta} for g = g_n^{a,j}.

    g has vanishing derivatives at 0 up to order N, so its S_p^beta norm is
    its weighted L_p norm; the bound is the Rayleigh quotient of T_n at g with
    the mass terms of T_n g dropped.
    """
    mode = BetaMode.parse(mode)
    S = cache.product
    alpha = S.alpha
    p = float(p)
    check_admissible(alpha, p, mode)
    if mode is BetaMode.ALPHA and not alpha > -0.5:
        raise DomainError("beta = alpha needs alpha > -1/2")
    if j is None:
        j = choose_j(alpha, S.N, p)
    g = build_test_function(alpha, S, n, j).expansion
    g_norm = lp_norm(g, p, mode)
    g_hat = g_hat_exact(alpha, n, j, cache)
    q_norm = lp_norm(cache.q(n), p, mode)
    cnn = abs(c(n, n))
    if not cnn > 0:
        raise ValueError("c_{n,n} must be nonzero")
    bound = cnn * abs(g_hat) * q_norm / g_norm
    if detail:
        return {"n": n, "p": p, "mode": mode.value, "j": j, "g_norm": g_norm,
                "g_hat_n": g_hat, "q_norm": q_norm, "bound": bound}
    return bound
