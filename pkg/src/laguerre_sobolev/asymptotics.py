"""Bessel-type limit functions, Mehler-Heine profiles and limit extrapolation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .laguerre import LaguerreExpansion, check_alpha, eval_expansion, log_gamma

__all__ = [
    "bessel_entire",
    "BesselLikeProfile",
    "mh_profile_laguerre",
    "mh_profile_sobolev",
    "limit_profile",
    "sup_deviation",
    "sign_changes",
    "LimitDiagnosis",
    "limit_diagnose",
    "DEFAULT_GRID",
]

DEFAULT_GRID = np.linspace(0.0, 30.0, 600)


def _bessel_entire_scalar(alpha: float, j: int, x: float) -> float:
    nu = alpha + 2 * j
    if x == 0.0:
        return math.exp(-log_gamma(nu + 1)) if j == 0 else 0.0
    term = math.exp(j * math.log(x) - log_gamma(nu + 1))
    total = term
    m = 0
    while True:
        m += 1
        term *= -x / (m * (nu + m))
        total += term
        # terms grow until m ~ sqrt(x), then decay factorially
        if m * m > x and abs(term) < 1e-16 * abs(total):
            break
        if m > 2000:
            break
    return total


def bessel_entire(alpha: float, j: int, x):
    """E(x) = sum_m (-1)^m x^{j+m} / (m! Gamma(a+2j+m+1)) = x^{-a/2} J_{a+2j}(2 sqrt x).

    Power series; terms peak near m ~ sqrt(x), so about e^{2 sqrt x} of
    cancellation is incurred.  Full double accuracy holds for x up to a few
    tens, which covers the Mehler-Heine compacts used here.
    """
    alpha = float(alpha)
    if not alpha + 2 * j > -1:
        raise ValueError("need alpha + 2j > -1")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    out = np.vectorize(lambda v: _bessel_entire_scalar(alpha, j, float(v)), otypes=[float])(x)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BesselLikeProfile:
    """phi(x) = sum_j b_j sqrt(Gamma(a+2j+1)) E_{a,j}(x).

    The weight sqrt(Gamma(a+2j+1)) is the Mehler-Heine constant of the
    orthonormal l^{a+2j}, the parameter each term of the connection
    representation is normalized with.  For j = 0 it is sqrt(Gamma(a+1)).
    """

    alpha: float
    b_limits: tuple[float, ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for j, bj in enumerate(self.b_limits):
            if bj != 0.0:
                total = total + bj * math.exp(0.5 * log_gamma(self.alpha + 2 * j + 1)) * bessel_entire(self.alpha, j, x)
        return total if total.ndim else float(total)


def mh_profile_laguerre(alpha: float, n: int, k_shift: int, xs) -> np.ndarray:
    """l_n^a(x/(n+k)) / n^{a/2} on the grid."""
    alpha = check_alpha(alpha)
    xs = np.asarray(xs, dtype=float)
    f = LaguerreExpansion.basis(alpha, n)
    return eval_expansion(f, xs / (n + k_shift)) / n ** (alpha / 2)


def mh_profile_sobolev(cache, n: int, xs) -> np.ndarray:
    """q_n(x/n) / n^{a/2} on the grid."""
    if n > cache.n_max:
        raise ValueError("n exceeds the cache")
    xs = np.asarray(xs, dtype=float)
    return eval_expansion(cache.q(n), xs / n) / n ** (cache.alpha / 2)


def sup_deviation(profile, limit) -> float:
    return float(np.max(np.abs(np.asarray(profile) - np.asarray(limit))))


def sign_changes(values, rel_floor: float = 1e-10) -> int:
    """Count strict sign changes, ignoring entries negligible against the max."""
    v = np.asarray(values, dtype=float)
    v = v[np.abs(v) > rel_floor * np.max(np.abs(v))]
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


@dataclass(frozen=True)
class LimitDiagnosis:
    estimate: float
    trend_ok: bool
    residual: float

    @property
    def nonzero(self) -> bool:
        """Limit separated from zero: |estimate| > 50 * residual."""
        return abs(self.estimate) > 50 * self.residual


def limit_diagnose(seq) -> LimitDiagnosis:
    """Extrapolate value(n) = L + c/n + d/n^2 + ... to n -> inf.

    ``estimate`` is the least-squares L over all points using the basis
    {1, 1/n, 1/n^2}; ``residual`` is the spread between that and the
    two-point Richardson value from the last two samples, plus the rms misfit.
    ``trend_ok`` asks that |value(n) - L| strictly decreases over the last
    three points.
    """
    pts = sorted((float(n), float(v)) for n, v in seq)
    if len(pts) < 4:
        raise ValueError("limit_diagnose needs at least 4 points")
    ns = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts])
    if np.any(np.diff(ns) <= 0):
        raise ValueError("n values must be distinct")
    A = np.stack([np.ones_like(ns), 1 / ns, 1 / ns**2], axis=1)
    coef, *_ = np.linalg.lstsq(A, vs, rcond=None)
    est = float(coef[0])
    rms = float(np.sqrt(np.mean((A @ coef - vs) ** 2)))
    n1, n2 = ns[-2], ns[-1]
    rich = float((n2 * vs[-1] - n1 * vs[-2]) / (n2 - n1))
    residual = abs(est - rich) + rms
    gaps = np.abs(vs[-3:] - est)
    trend = bool(gaps[0] > gaps[1] > gaps[2]) or bool(np.all(gaps <= 1e-14 * max(1.0, abs(est))))
    return LimitDiagnosis(est, trend, residual)


def limit_profile(cache, ns=None) -> BesselLikeProfile:
    """Bessel-like limit built from b_j limits extrapolated over n."""
    S = cache.product
    if ns is None:
        top = cache.n_max
        ns = [n for n in range(top // 4, top + 1, max(top // 8, 1)) if n >= S.N + 1]
    limits = []
    for j in range(S.N + 2):
        diag = limit_diagnose([(n, cache.b[n, j]) for n in ns])
        limits.append(diag.estimate if diag.nonzero else 0.0)
    return BesselLikeProfile(S.alpha, tuple(limits))
