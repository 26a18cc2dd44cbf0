"""Classical Laguerre polynomials L_n^a and their orthonormal versions l_n^a.

Normalization follows L_n^a(0) = binom(n + a, n), and l_n^a = L_n^a / ||L_n^a||
where the norm is taken against the probability measure
x^a e^{-x} dx / Gamma(a + 1).  Gamma ratios are evaluated in log space so the
formulas stay finite well past n = 400.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, zeta

__all__ = [
    "LaguerreExpansion",
    "check_alpha",
    "log_gamma",
    "eval_L",
    "deriv_at_zero",
    "orthonormal_deriv_at_zero",
    "norm_sq_L",
    "kernel_deriv_zero",
    "kernel_expansion",
    "eval_expansion",
    "eval_weighted",
    "weighted_table",
    "expansion_deriv_zero",
    "recurrence_coeffs",
]

# rescale the forward recurrence once values exceed this magnitude
_RESCALE = 1e100
_LOG_RESCALE = math.log(_RESCALE)

_EULER_GAMMA = 0.57721566490153286061
_ZETA = zeta(np.arange(2, 60, dtype=float))


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > -1.0:
        raise ValueError(f"Laguerre parameter must satisfy alpha > -1, got {alpha}")
    return alpha


def _lgamma_near_one(eps: float) -> float:
    # log Gamma(1 + eps) = -gamma*eps + sum_k (-1)^k zeta(k) eps^k / k
    total = -_EULER_GAMMA * eps
    power = -eps
    for k, z in enumerate(_ZETA, start=2):
        power *= -eps
        term = z * power / k
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0.

    Near the zeros of log Gamma at 1 and 2 a Taylor series in zeta values is
    used so the result keeps full relative accuracy there.
    """
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise ValueError(f"log_gamma requires a finite positive argument, got {x}")
    if abs(x - 1.0) < 0.25:
        return _lgamma_near_one(x - 1.0)
    if abs(x - 2.0) < 0.25:
        eps = x - 2.0
        return _lgamma_near_one(eps) + math.log1p(eps)
    return float(gammaln(x))


def eval_L(alpha: float, n: int, x):
    """L_n^alpha(x) by the three-term recurrence."""
    alpha = check_alpha(alpha)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for k in range(n):
        nxt = ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
        prev, cur = cur, nxt
    return cur if cur.ndim else float(cur)


def _log_abs_deriv(alpha: float, n: int, k: int) -> float:
    return log_gamma(n + alpha + 1) - log_gamma(n - k + 1) - log_gamma(alpha + k + 1)


def deriv_at_zero(alpha: float, n: int, k: int) -> float:
    """(L_n^alpha)^{(k)}(0) = (-1)^k Gamma(n+a+1) / ((n-k)! Gamma(a+k+1)); zero for k > n."""
    alpha = check_alpha(alpha)
    if k > n:
        return 0.0
    sign = -1.0 if k % 2 else 1.0
    return sign * math.exp(_log_abs_deriv(alpha, n, k))


def norm_sq_L(alpha: float, n: int) -> float:
    alpha = check_alpha(alpha)
    return math.exp(_log_norm_sq(alpha, n))


def _log_norm_sq(alpha: float, n: int) -> float:
    return log_gamma(n + alpha + 1) - log_gamma(n + 1) - log_gamma(alpha + 1)


def orthonormal_deriv_at_zero(alpha: float, n: int, k: int) -> float:
    """(l_n^alpha)^{(k)}(0), computed as a single log-space ratio."""
    alpha = check_alpha(alpha)
    if k > n:
        return 0.0
    sign = -1.0 if k % 2 else 1.0
    return sign * math.exp(_log_abs_deriv(alpha, n, k) - 0.5 * _log_norm_sq(alpha, n))


@lru_cache(maxsize=256)
def _deriv_table(alpha: float, n_max: int, k_max: int) -> np.ndarray:
    """table[i, k] = (l_i^alpha)^{(k)}(0) for i <= n_max, k <= k_max (read-only)."""
    table = np.zeros((n_max + 1, k_max + 1))
    for i in range(n_max + 1):
        for k in range(min(i, k_max) + 1):
            table[i, k] = orthonormal_deriv_at_zero(alpha, i, k)
    table.setflags(write=False)
    return table


def kernel_deriv_zero(alpha: float, n: int, k: int, h: int) -> float:
    """K_n^{(k,h)}(0, 0) = sum_{i<=n} (l_i)^{(k)}(0) (l_i)^{(h)}(0), compensated sum."""
    alpha = check_alpha(alpha)
    if n < 0:
        return 0.0
    table = _deriv_table(alpha, n, max(k, h))
    return math.fsum(table[:, k] * table[:, h])


def kernel_expansion(alpha: float, n: int, h: int = 0) -> "LaguerreExpansion":
    """K_n^{(0,h)}(x, 0) as a function of x, stored in the orthonormal basis."""
    alpha = check_alpha(alpha)
    table = _deriv_table(alpha, n, h)
    return LaguerreExpansion(alpha, np.array(table[:, h]))


def recurrence_coeffs(alpha: float, n: int):
    """Diagonal and off-diagonal of the Jacobi matrix of {l_k^alpha}, k < n.

    x l_k = a_{k+1} l_{k+1} + b_k l_k + a_k l_{k-1} with b_k = 2k + a + 1 and
    a_k = -sqrt(k (k + a)).
    """
    k = np.arange(n, dtype=float)
    diag = 2 * k + alpha + 1
    off = -np.sqrt(k[1:] * (k[1:] + alpha))
    return diag, off


@dataclass(frozen=True)
class LaguerreExpansion:
    """Polynomial sum_k coeffs[k] * l_k^alpha.

    ``derivs`` optionally carries f^{(k)}(0) for k < len(derivs) when those
    values are known more accurately than summing the basis derivatives
    (which cancels badly for high-order derivatives at large degree).
    """

    alpha: float
    coeffs: np.ndarray
    derivs: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        check_alpha(self.alpha)
        coeffs = np.atleast_1d(np.asarray(self.coeffs))
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coeffs must be a nonempty 1-d sequence")
        if not np.issubdtype(coeffs.dtype, np.complexfloating):
            coeffs = coeffs.astype(float)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        if self.derivs is not None:
            derivs = np.array(self.derivs)
            derivs.setflags(write=False)
            object.__setattr__(self, "derivs", derivs)

    @classmethod
    def basis(cls, alpha: float, n: int) -> "LaguerreExpansion":
        coeffs = np.zeros(n + 1)
        coeffs[n] = 1.0
        return cls(alpha, coeffs)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def __call__(self, x):
        return eval_expansion(self, x)

    def _combine(self, other, sign):
        if self.alpha != other.alpha:
            raise ValueError("expansions have different alpha")
        size = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(size, dtype=np.result_type(self.coeffs, other.coeffs))
        a[: self.coeffs.size] += self.coeffs
        a[: other.coeffs.size] += sign * other.coeffs
        derivs = None
        if self.derivs is not None and other.derivs is not None:
            m = min(self.derivs.size, other.derivs.size)
            derivs = self.derivs[:m] + sign * other.derivs[:m]
        return LaguerreExpansion(self.alpha, a, derivs)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        derivs = None if self.derivs is None else scalar * self.derivs
        return LaguerreExpansion(self.alpha, scalar * self.coeffs, derivs)

    __rmul__ = __mul__


def eval_expansion(f: LaguerreExpansion, x):
    """sum_k c_k l_k^alpha(x) by Clenshaw's backward recurrence."""
    x = np.asarray(x, dtype=float)
    c = f.coeffs
    n = c.size - 1
    diag, off = recurrence_coeffs(f.alpha, n + 1)
    # l_{k+1} = A_k l_k + B_k l_{k-1}, A_k = (x - b_k)/a_{k+1}, B_k = -a_k/a_{k+1}
    y1 = np.zeros(x.shape, dtype=np.result_type(c, x))
    y2 = np.zeros_like(y1)
    # off[k] = a_{k+1}
    for k in range(n, -1, -1):
        if k < n:
            A = (x - diag[k]) / off[k]
            B_next = -off[k] / off[k + 1] if k + 1 < n else 0.0
            y = c[k] + A * y1 + B_next * y2
        else:
            y = c[k] + 0 * y1
        y2, y1 = y1, y
    return y1 if y1.ndim else y1[()]


def _scaled_sweep(alpha, x, n, coeffs=None, log_weight=None, table=False, squares=False):
    """Forward orthonormal recurrence with per-point rescaling.

    Returns a dict with the requested quantities as (mantissa, log_scale)
    pairs: the true value is mantissa * exp(log_scale), and for squares the
    scale is doubled.
    """
    x = np.asarray(x, dtype=float)
    diag, off = recurrence_coeffs(alpha, n + 1)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    logs = np.zeros_like(x) if log_weight is None else np.array(log_weight, dtype=float)
    acc = None
    if coeffs is not None:
        acc = np.zeros(x.shape, dtype=np.result_type(coeffs, x)) + coeffs[0] * cur
    sq = cur * cur if squares else None
    rows = []
    if table:
        rows.append(cur * np.exp(logs))
    for k in range(n):
        nxt = ((x - diag[k]) * cur - (off[k - 1] if k else 0.0) * prev) / off[k]
        prev, cur = cur, nxt
        if acc is not None:
            acc = acc + coeffs[k + 1] * cur
        if sq is not None:
            sq = sq + cur * cur
        big = np.abs(cur) > _RESCALE
        if big.any():
            prev = np.where(big, prev / _RESCALE, prev)
            cur = np.where(big, cur / _RESCALE, cur)
            if acc is not None:
                acc = np.where(big, acc / _RESCALE, acc)
            if sq is not None:
                sq = np.where(big, sq / _RESCALE**2, sq)
            logs = logs + np.where(big, _LOG_RESCALE, 0.0)
        if table:
            with np.errstate(over="ignore", under="ignore"):
                rows.append(cur * np.exp(logs))
    out = {"last": (cur, logs), "prev": (prev, logs)}
    if acc is not None:
        out["sum"] = (acc, logs)
    if sq is not None:
        out["squares"] = (sq, 2 * logs)
    if table:
        out["table"] = np.array(rows)
    return out


def _unscale(mantissa, logs):
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        mag = np.abs(mantissa)
        safe = np.where(mag > 0, mag, 1.0)
        val = np.where(mag > 0, np.exp(np.log(safe) + logs), 0.0)
    return np.where(mantissa < 0, -val, val) if not np.iscomplexobj(mantissa) else mantissa * np.exp(logs)


def eval_weighted(f: LaguerreExpansion, x, log_weight=None):
    """f(x) * exp(log_weight(x)) without intermediate overflow.

    ``log_weight`` is an array broadcastable to x (e.g. -x/2).  This is the
    evaluation path used for large arguments, where f itself overflows but
    f(x) e^{-x/2} is moderate.
    """
    x = np.asarray(x, dtype=float)
    lw = np.zeros_like(x) if log_weight is None else np.broadcast_to(log_weight, x.shape)
    res = _scaled_sweep(f.alpha, x, f.coeffs.size - 1, coeffs=f.coeffs, log_weight=lw)
    return _unscale(*res["sum"])


def weighted_table(alpha: float, n: int, x, log_weight=None) -> np.ndarray:
    """Rows k = 0..n of l_k^alpha(x) * exp(log_weight)."""
    alpha = check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    lw = np.zeros_like(x) if log_weight is None else np.broadcast_to(log_weight, x.shape)
    return _scaled_sweep(alpha, x, n, log_weight=lw, table=True)["table"]


def expansion_deriv_zero(f: LaguerreExpansion, k: int):
    """f^{(k)}(0); uses carried derivative data when available."""
    if f.derivs is not None and k < f.derivs.size:
        return f.derivs[k]
    n = f.coeffs.size - 1
    if k > n:
        return 0.0
    table = _deriv_table(f.alpha, n, k)
    terms = f.coeffs * table[:, k]
    if np.iscomplexobj(terms):
        return complex(math.fsum(terms.real), math.fsum(terms.imag))
    return math.fsum(terms)


def deriv_scale(f: LaguerreExpansion, k: int) -> float:
    """sum_i |c_i (l_i)^{(k)}(0)|, the magnitude against which f^{(k)}(0) cancels."""
    n = f.coeffs.size - 1
    if k > n:
        return 0.0
    table = _deriv_table(f.alpha, n, k)
    return math.fsum(np.abs(f.coeffs * table[:, k]))
