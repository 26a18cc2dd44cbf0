"""Discrete Laguerre-Sobolev orthonormal polynomials.

The inner product is

    <p, q>_S = (1/Gamma(a+1)) int_0^inf p q x^a e^{-x} dx + sum_j M_j p^{(j)}(0) q^{(j)}(0)

and everything is stored in the orthonormal Laguerre basis {l_k^a}, where the
integral part is the plain coefficient dot product.

Two independent constructions are provided: ``build_stagewise`` adds one
positive mass at a time by a rank-one kernel correction, and
``build_gram_oracle`` solves the bordered Gram system for each degree through
the identity-plus-low-rank structure of the Gram matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .laguerre import (
    LaguerreExpansion,
    _deriv_table,
    check_alpha,
    eval_weighted,
    expansion_deriv_zero,
    log_gamma,
    norm_sq_L,
    orthonormal_deriv_at_zero,
    weighted_table,
)

__all__ = [
    "SobolevProduct",
    "SobolevBasisCache",
    "NumericalFailure",
    "sobolev_inner",
    "build_stagewise",
    "build_gram_oracle",
    "connection_coeffs",
    "representation_residual",
    "q_deriv_ratio",
    "CACHE_FORMAT_VERSION",
]

CACHE_FORMAT_VERSION = 1


class NumericalFailure(RuntimeError):
    """A construction produced nonfinite or inconsistent numbers."""


@dataclass(frozen=True)
class SobolevProduct:
    """Laguerre parameter and masses (M_0, ..., M_N) on derivatives at 0.

    An empty mass tuple is allowed and means the plain Laguerre product
    (N = -1).
    """

    alpha: float
    masses: tuple[float, ...] = ()

    def __post_init__(self):
        check_alpha(self.alpha)
        masses = tuple(float(m) for m in self.masses)
        if any(not (m >= 0.0 and math.isfinite(m)) for m in masses):
            raise ValueError(f"masses must be finite and nonnegative, got {masses}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "masses", masses)

    @property
    def N(self) -> int:
        return len(self.masses) - 1

    @property
    def positive(self) -> tuple[int, ...]:
        """Indices j with M_j > 0, ascending."""
        return tuple(j for j, m in enumerate(self.masses) if m > 0)

    @property
    def first_gap(self) -> int:
        """First j with M_j = 0 (N + 1 when every mass is positive)."""
        for j, m in enumerate(self.masses):
            if m == 0:
                return j
        return len(self.masses)


def sobolev_inner(f: LaguerreExpansion, g: LaguerreExpansion, S: SobolevProduct):
    if f.alpha != S.alpha or g.alpha != S.alpha:
        raise ValueError("expansions and product must share alpha")
    m = min(f.coeffs.size, g.coeffs.size)
    terms = [f.coeffs[:m] * g.coeffs[:m]]
    for j, M in enumerate(S.masses):
        if M > 0:
            terms.append(np.array([M * expansion_deriv_zero(f, j) * expansion_deriv_zero(g, j)]))
    terms = np.concatenate(terms)
    if np.iscomplexobj(terms):
        return complex(math.fsum(terms.real), math.fsum(terms.imag))
    return math.fsum(terms)


def _cumsum_compensated(rows: np.ndarray) -> np.ndarray:
    """Neumaier-compensated cumulative sum along axis 0."""
    out = np.empty_like(rows)
    s = np.zeros_like(rows[0])
    c = np.zeros_like(rows[0])
    for i, r in enumerate(rows):
        t = s + r
        c += np.where(np.abs(s) >= np.abs(r), (s - t) + r, (r - t) + s)
        s = t
        out[i] = s + c
    return out


@dataclass(frozen=True, eq=False)
class SobolevBasisCache:
    """q_0..q_{n_max} for one product.

    ``coeffs[n, :n+1]`` holds q_n in the l^a basis; the coefficient of l_n is
    positive, so Q_n = sqrt(norm_sq_Q[n]) q_n has the leading coefficient of
    L_n^a.  ``derivs[n, k]`` is q_n^{(k)}(0) for k = 0..N+1 and ``b[n]`` the
    connection coefficients (NaN for n <= N).
    """

    product: SobolevProduct
    coeffs: np.ndarray
    norm_sq_Q: np.ndarray
    derivs: np.ndarray
    b: np.ndarray
    method: str

    @property
    def n_max(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def alpha(self) -> float:
        return self.product.alpha

    def q(self, n: int) -> LaguerreExpansion:
        return LaguerreExpansion(self.alpha, self.coeffs[n, : n + 1], self.derivs[n])

    def Q(self, n: int) -> LaguerreExpansion:
        return math.sqrt(self.norm_sq_Q[n]) * self.q(n)

    def to_json(self) -> str:
        doc = {
            "format": "laguerre-sobolev-basis",
            "version": CACHE_FORMAT_VERSION,
            "alpha": self.alpha,
            "masses": list(self.product.masses),
            "n_max": self.n_max,
            "method": self.method,
            "entries": [
                {
                    "n": n,
                    "q_coeffs": [float(v) for v in self.coeffs[n, : n + 1]],
                    "norm_sq_Q": float(self.norm_sq_Q[n]),
                    "derivs_at_zero": [float(v) for v in self.derivs[n]],
                    "b": None if np.isnan(self.b[n]).any() else [float(v) for v in self.b[n]],
                }
                for n in range(self.n_max + 1)
            ],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SobolevBasisCache":
        doc = json.loads(text)
        if doc.get("format") != "laguerre-sobolev-basis":
            raise ValueError("not a serialized Laguerre-Sobolev basis")
        if doc.get("version") != CACHE_FORMAT_VERSION:
            raise ValueError(f"unsupported basis format version {doc.get('version')}")
        S = SobolevProduct(doc["alpha"], tuple(doc["masses"]))
        n_max = doc["n_max"]
        coeffs = np.zeros((n_max + 1, n_max + 1))
        norms = np.empty(n_max + 1)
        derivs = np.empty((n_max + 1, S.N + 2))
        b = np.full((n_max + 1, S.N + 2), np.nan)
        for e in doc["entries"]:
            n = e["n"]
            coeffs[n, : n + 1] = e["q_coeffs"]
            norms[n] = e["norm_sq_Q"]
            derivs[n] = e["derivs_at_zero"]
            if e["b"] is not None:
                b[n] = e["b"]
        return _freeze(S, coeffs, norms, derivs, b, doc["method"])


def _freeze(S, coeffs, norms, derivs, b, method) -> SobolevBasisCache:
    for a in (coeffs, norms, derivs, b):
        a.setflags(write=False)
    return SobolevBasisCache(S, coeffs, norms, derivs, b, method)


def _finish(S: SobolevProduct, C: np.ndarray, norms: np.ndarray, D: np.ndarray, method: str):
    """Normalize Q_n (leading coefficient of L_n) to q_n and attach b_j(n)."""
    scale = 1.0 / np.sqrt(norms)
    coeffs = C * scale[:, None]
    derivs = D * scale[:, None]
    n_max = C.shape[0] - 1
    b = np.full((n_max + 1, S.N + 2), np.nan)
    for n in range(max(S.N + 1, 0), n_max + 1):
        b[n] = _solve_connection(S.alpha, n, derivs[n])
    return _freeze(S, coeffs, norms, derivs, b, method)


def build_stagewise(S: SobolevProduct, n_max: int) -> SobolevBasisCache:
    """Add the positive masses one at a time (rank-one kernel corrections).

    Stage s turns {Q_{n,s-1}} into {Q_{n,s}} with

        Q_{n,s} = Q_{n,s-1} - M Q_{n,s-1}^{(j)}(0) / (1 + M K_{n-1}^{(j,j)}) * K_{n-1}^{(0,j)}(x, 0)

    where the kernels belong to the previous stage.  Derivative values at 0 are
    propagated through the same formula instead of being re-summed from the
    coefficients, which would cancel catastrophically.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    alpha = S.alpha
    K = S.N + 2
    ns = np.arange(n_max + 1)
    lnorm = np.sqrt([norm_sq_L(alpha, n) for n in ns])
    # stage 0: Q_{n,0} = L_n
    C = np.diag(lnorm)
    norms = lnorm**2
    D = _deriv_table(alpha, n_max, K - 1) * lnorm[:, None]
    D = np.array(D)

    for stage, j in enumerate(S.positive, start=1):
        M = S.masses[j]
        w = D[:, j] / norms
        # running kernels: row i holds K_{i, s-1}
        kvec = _cumsum_compensated(C * w[:, None])
        kscal = _cumsum_compensated(D * w[:, None])
        C_new = C.copy()
        D_new = D.copy()
        norms_new = norms.copy()
        for n in range(n_max + 1):
            # K_{-1} = 0: degree 0 only picks up the mass in its norm
            kv = kvec[n - 1] if n else 0.0
            ks = kscal[n - 1] if n else np.zeros(K)
            denom = 1.0 + M * ks[j]
            factor = M * D[n, j] / denom
            C_new[n] = C[n] - factor * kv
            D_new[n] = D[n] - factor * ks
            D_new[n, j] = D[n, j] / denom
            norms_new[n] = norms[n] + factor * D[n, j]
        C, D, norms = C_new, D_new, norms_new
        bad = ~(np.isfinite(C).all(axis=1) & np.isfinite(D).all(axis=1) & np.isfinite(norms))
        if bad.any():
            n = int(np.flatnonzero(bad)[0])
            raise NumericalFailure(f"nonfinite value at stage {stage} (mass index {j}), degree {n}")
    return _finish(S, C, norms, D, "stagewise")


def build_gram_oracle(S: SobolevProduct, n_max: int) -> SobolevBasisCache:
    """Degree-by-degree solve of the bordered Gram system G_{n+1} c = e_n.

    In the l^a basis G = I + sum_j M_j d_j d_j^T, d_j[i] = (l_i)^{(j)}(0).
    The solve goes through the small capacitance matrix diag(1/M) + D^T D
    (Woodbury), so the identity part is never swamped by the rank-r part.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    alpha = S.alpha
    K = S.N + 2
    pos = list(S.positive)
    table = _deriv_table(alpha, n_max, max(K - 1, 0))
    lnorm_sq = np.array([norm_sq_L(alpha, n) for n in range(n_max + 1)])
    C = np.zeros((n_max + 1, n_max + 1))
    norms = np.empty(n_max + 1)
    D = np.empty((n_max + 1, K))
    Mvec = np.array([S.masses[j] for j in pos])
    # kern[n] = sum_{i<=n} d_k[i] d_h[i] over all orders 0..K-1
    prods = table[:, :, None] * table[:, None, :]
    kern = _cumsum_compensated(prods)
    for n in range(n_max + 1):
        c = np.zeros(n + 1)
        c[n] = 1.0
        if pos:
            Dn = table[: n + 1][:, pos]
            cap = np.diag(1.0 / Mvec) + kern[n][np.ix_(pos, pos)]
            s = 1.0 / np.sqrt(np.diag(cap))
            try:
                fac = cho_factor(cap * s[:, None] * s[None, :], lower=True)
            except LinAlgError as exc:
                raise NumericalFailure(f"capacitance matrix lost positive definiteness at degree {n}") from exc
            y = s * cho_solve(fac, s * Dn[n])
            c = c - Dn @ y
            cn = 1.0 - float(Dn[n] @ y)
            derivs = table[n, :K] - kern[n][:K][:, pos] @ y
            for idx, j in enumerate(pos):
                derivs[j] = y[idx] / Mvec[idx]
        else:
            cn = 1.0
            derivs = np.array(table[n, :K])
        if not cn > 0 or not np.isfinite(c).all():
            raise NumericalFailure(f"Gram solve lost positive definiteness at degree {n}")
        # Q_n has coefficient ||L_n|| on l_n
        scale = math.sqrt(lnorm_sq[n]) / cn
        C[n, : n + 1] = c * scale
        D[n] = derivs * scale
        norms[n] = lnorm_sq[n] / cn
    return _finish(S, C, norms, D, "gram")


def _log_abs_orth_deriv(alpha: float, m: int, k: int) -> float:
    # log |(l_m^alpha)^{(k)}(0)|
    return (
        0.5 * (log_gamma(m + alpha + 1) + log_gamma(m + 1) + log_gamma(alpha + 1))
        - log_gamma(m - k + 1)
        - log_gamma(alpha + k + 1)
    )


def connection_A(alpha: float, j: int, k: int, n: int) -> float:
    """A_j(k, n) = (l_{n-j}^{a+2j})^{(k-j)}(0) / (l_n^a)^{(k)}(0), in log space."""
    if j == 0:
        return 1.0
    sign = -1.0 if j % 2 else 1.0
    return sign * math.exp(
        _log_abs_orth_deriv(alpha + 2 * j, n - j, k - j) - _log_abs_orth_deriv(alpha, n, k)
    )


def connection_A_limit(alpha: float, j: int, k: int) -> float:
    """lim_n A_j(k, n)."""
    sign = -1.0 if j % 2 else 1.0
    return sign * math.exp(
        log_gamma(alpha + k + 1)
        - log_gamma(alpha + k + j + 1)
        + 0.5 * (log_gamma(alpha + 2 * j + 1) - log_gamma(alpha + 1))
    )


def _solve_connection(alpha: float, n: int, derivs: np.ndarray) -> np.ndarray:
    K = derivs.size
    ratios = np.array([derivs[k] / orthonormal_deriv_at_zero(alpha, n, k) for k in range(K)])
    b = np.zeros(K)
    for k in range(K):
        acc = ratios[k]
        for j in range(k):
            acc -= b[j] * math.comb(k, j) * math.factorial(j) * connection_A(alpha, j, k, n)
        b[k] = acc / (math.factorial(k) * connection_A(alpha, k, k, n))
    return b


def connection_coeffs(cache: SobolevBasisCache, n: int) -> np.ndarray:
    """b_0(n), ..., b_{N+1}(n) with q_n = sum_j b_j(n) x^j l_{n-j}^{a+2j}.

    Solved from the lower-triangular system matching q_n^{(k)}(0), k <= N+1.
    """
    S = cache.product
    if n < S.N + 1:
        raise ValueError(f"representation needs n >= N+1 = {S.N + 1}")
    return _solve_connection(S.alpha, n, cache.derivs[n])


def representation_residual(cache: SobolevBasisCache, n: int, b=None) -> float:
    """Max weighted deviation between q_n and its connection representation.

    Both sides are sampled at the nodes of an (n+2)-point Gauss rule for
    x^a e^{-x}, scaled by sqrt(weight), and the max difference is divided by
    the max of |q_n| on the same scale.
    """
    from .norms import build_quadrature

    S = cache.product
    alpha = S.alpha
    b = connection_coeffs(cache, n) if b is None else b
    rule = build_quadrature(alpha, n + 2)
    t = rule.nodes
    half_logw = 0.5 * rule.log_weights
    q_vals = eval_weighted(cache.q(n), t, half_logw)
    rep = np.zeros_like(t)
    for j, bj in enumerate(b):
        m = n - j
        if m < 0:
            continue
        row = weighted_table(alpha + 2 * j, m, t, half_logw + j * np.log(t))[m]
        rep += bj * row
    return float(np.max(np.abs(rep - q_vals)) / np.max(np.abs(q_vals)))


def q_deriv_ratio(cache: SobolevBasisCache, k: int, n: int) -> float:
    """q_n^{(k)}(0) / (l_n^a)^{(k)}(0)."""
    if not 0 <= k <= cache.product.N + 1:
        raise ValueError("derivative order outside 0..N+1")
    if n < k:
        raise ValueError("need n >= k")
    return float(cache.derivs[n, k] / orthonormal_deriv_at_zero(cache.alpha, n, k))
