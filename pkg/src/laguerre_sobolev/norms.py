"""Gauss rules for t^g e^{-t} and weighted L_p / S_p norms of expansions.

Two weight regimes are supported (``BetaMode``):

* ``ALPHA``:   ||f||^p = int_0^inf |f(x) e^{-x/2}|^p x^a dx
* ``PALPHA2``: ||f||^p = int_0^inf |f(x) e^{-x/2} x^{a/2}|^p dx

These integrals carry no 1/Gamma(a+1) factor, unlike the Sobolev inner
product; ``normalized=True`` divides the p-th power by Gamma(a+1) instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize, stats
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_jacobi, roots_legendre

from .laguerre import LaguerreExpansion, _scaled_sweep, check_alpha, eval_weighted, log_gamma, recurrence_coeffs

__all__ = [
    "QuadratureRule",
    "BetaMode",
    "DomainError",
    "ConvergenceFailure",
    "build_quadrature",
    "check_admissible",
    "pollard_endpoints",
    "lp_norm",
    "sobolev_space_norm",
    "probability_p_mean",
    "norm_growth",
    "norm_growth_exponent",
    "GrowthReport",
    "DEFAULT_N_GRID",
]

DEFAULT_N_GRID = tuple(range(25, 201, 25))
RULE_CAP = 16384
PANEL_CAP = 512


class DomainError(ValueError):
    """Parameters outside the admissible range of a weighted space."""


class ConvergenceFailure(RuntimeError):
    def __init__(self, msg, last_values=None):
        super().__init__(msg)
        self.last_values = last_values


class BetaMode(enum.Enum):
    ALPHA = "alpha"
    PALPHA2 = "palpha2"

    @classmethod
    def parse(cls, value) -> "BetaMode":
        if isinstance(value, cls):
            return value
        aliases = {"alpha": cls.ALPHA, "beta_alpha": cls.ALPHA,
                   "palpha2": cls.PALPHA2, "beta_p_alpha_over_2": cls.PALPHA2}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown weight mode {value!r}") from None

    def beta(self, alpha: float, p: float) -> float:
        if self is BetaMode.ALPHA:
            return alpha
        return alpha * p / 2


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """m-point Gauss rule for the weight t^gamma e^{-t} on (0, inf).

    ``log_weights`` stays finite where ``weights`` underflow (large m).
    """

    gamma: float
    nodes: np.ndarray
    weights: np.ndarray
    log_weights: np.ndarray
    exact_degree: int = field(default=0)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def build_quadrature(gamma: float, m: int) -> QuadratureRule:
    """Golub-Welsch nodes, Newton-polished, with Christoffel-sum weights.

    Weights come from w_i = Gamma(g+1) / sum_{k<m} l_k^g(t_i)^2 evaluated with
    the rescaled recurrence, so they remain accurate (in log form) long after
    the eigenvector route underflows.
    """
    gamma = check_alpha(gamma)
    if m < 1:
        raise ValueError("rule size must be positive")
    diag, off = recurrence_coeffs(gamma, m)
    if m == 1:
        t = diag.copy()
    else:
        t = eigh_tridiagonal(diag, np.abs(off), eigvals_only=True)
        s = math.sqrt(m * (m + gamma))
        for _ in range(2):
            sweep = _scaled_sweep(gamma, t, m)
            lm = sweep["last"][0]
            lm1 = sweep["prev"][0]
            # t l_m' = m l_m - sqrt(m(m+g)) l_{m-1}
            t = t - t * lm / (m * lm - s * lm1)
    sweep = _scaled_sweep(gamma, t, m - 1, squares=True)
    sq, sq_log = sweep["squares"]
    log_w = log_gamma(gamma + 1) - (np.log(sq) + sq_log)
    with np.errstate(under="ignore"):
        w = np.exp(log_w)
    for a in (t, w, log_w):
        a.setflags(write=False)
    return QuadratureRule(gamma, t, w, log_w, 2 * m - 1)


def check_admissible(alpha: float, p: float, mode: BetaMode) -> None:
    alpha = check_alpha(alpha)
    if not p >= 1:
        raise DomainError(f"p must be in [1, inf], got {p}")
    if mode is BetaMode.PALPHA2:
        if math.isinf(p) and alpha < 0:
            raise DomainError("p = inf with beta = a p/2 needs alpha >= 0")
        if not math.isinf(p) and not alpha > -2.0 / p:
            raise DomainError(f"beta = a p/2 needs alpha > -2/p = {-2.0 / p}")


def pollard_endpoints(alpha: float, mode) -> tuple[float, float]:
    """(p_0, q_0), conjugate exponents bounding the Pollard interval."""
    mode = BetaMode.parse(mode)
    check_alpha(alpha)
    if mode is BetaMode.PALPHA2:
        q0 = 4.0
    else:
        if not alpha > -0.5:
            raise DomainError("beta = alpha needs alpha > -1/2 for a finite q_0")
        q0 = (4 * alpha + 4) / (2 * alpha + 1)
    return q0 / (q0 - 1), q0


def _is_even_int(p: float) -> bool:
    return float(p).is_integer() and int(p) % 2 == 0


def _positive_zeros(f: LaguerreExpansion) -> np.ndarray:
    """Real positive zeros from the comrade matrix of the l^a basis."""
    c = np.real_if_close(f.coeffs)
    if np.iscomplexobj(c):
        return np.empty(0)
    # negligible leading coefficients would throw spurious roots far out
    big = np.nonzero(np.abs(c) > 1e-13 * np.max(np.abs(c)))[0]
    d = int(big[-1]) if big.size else 0
    if d < 1:
        return np.empty(0)
    diag, off = recurrence_coeffs(f.alpha, d + 1)
    A = np.diag(diag[:d]) + np.diag(off[: d - 1], 1) + np.diag(off[: d - 1], -1)
    A[d - 1, :] -= off[d - 1] * c[:d] / c[d]
    ev = np.linalg.eigvals(A)
    keep = (np.abs(ev.imag) <= 1e-8 * (1 + np.abs(ev.real))) & (ev.real > 0)
    return np.unique(np.sort(ev.real[keep]))


def _abs_power_gauss(f, p, beta, rate, tol):
    """int |f|^p e^{-rate x} x^beta dx for even integer p (exact Gauss route)."""
    deg = max(f.degree, 0)
    m = max(1, math.ceil((p * deg + 1) / 2))
    prev = None
    while True:
        rule = build_quadrature(beta, m)
        x = rule.nodes / rate
        G = eval_weighted(f, x, -(rate / p) * x)
        with np.errstate(under="ignore"):
            terms = np.exp(rule.log_weights + rule.nodes) * np.abs(G) ** p
        val = math.fsum(terms) * rate ** (-beta - 1)
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return val
        if 2 * m > RULE_CAP:
            raise ConvergenceFailure("rule doubling did not converge", (prev, val))
        prev, m = val, 2 * m


def _panels(f, p, beta, rate):
    """Breakpoints: 0, the positive zeros of f, then geometric tail panels."""
    zeros = _positive_zeros(f)

    def integrand(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        G = eval_weighted(f, x, -(rate / p) * x)
        return np.abs(G) ** p * x**beta

    if zeros.size:
        # drop zeros past the last panel where the integrand is still alive;
        # panels near a root at the origin are tiny but not dead
        mids = 0.5 * (np.concatenate(([0.0], zeros[:-1])) + zeros)
        vals = integrand(mids)
        alive = np.nonzero(vals > 1e-22 * np.max(vals))[0]
        zeros = zeros[: int(alive[-1]) + 1]
    brk = [0.0] + list(zeros)
    if len(brk) == 1:
        brk.append(1.0 / rate)

    gap = brk[-1] - brk[-2]
    width = max(gap, 1.0 / rate)
    probe = np.linspace(brk[1], brk[-1], 64) if len(brk) > 2 else np.array([brk[-1]])
    peak = float(np.max(integrand(probe)))
    for _ in range(400):
        end = brk[-1] + width
        val = float(integrand(end)[0])
        peak = max(peak, val)
        brk.append(end)
        if val <= 1e-22 * peak:
            break
        width *= 1.3
    return np.array(brk), integrand


def _abs_power_composite(f, p, beta, rate, tol):
    """Same integral for general p: Gauss panels between consecutive zeros.

    |f|^p is only finitely smooth at the zeros of f, so a global Gauss rule
    converges slowly; between zeros the integrand is analytic and each panel
    converges geometrically.  The first panel carries x^beta in its Jacobi
    weight.
    """
    brk, integrand = _panels(f, p, beta, rate)
    a, b = brk[:-1], brk[1:]
    m = 16
    prev = None
    while True:
        u, w = roots_legendre(m)
        uj, wj = roots_jacobi(m, 0.0, beta)
        h = 0.5 * (b[1:] - a[1:])
        x = (0.5 * (a[1:] + b[1:]))[:, None] + h[:, None] * u[None, :]
        body = integrand(x.ravel()).reshape(x.shape) @ w
        x0 = 0.5 * b[0] * (1 + uj)
        G0 = eval_weighted(f, x0, -(rate / p) * x0)
        first = (0.5 * b[0]) ** (beta + 1) * float(np.dot(wj, np.abs(G0) ** p))
        val = first + math.fsum(h * body)
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return val
        if 2 * m > PANEL_CAP:
            raise ConvergenceFailure("panel refinement did not converge", (prev, val))
        prev, m = val, 2 * m


def _abs_power_integral(f, p, beta, rate, tol):
    if _is_even_int(p):
        return _abs_power_gauss(f, p, beta, rate, tol)
    return _abs_power_composite(f, p, beta, rate, tol)


def _sup(f: LaguerreExpansion, mode: BetaMode) -> float:
    deg = max(f.degree, 1)
    x = np.geomspace(1e-8, 8.0 * deg, 4096)
    extra = mode is BetaMode.PALPHA2 and f.alpha != 0

    def weighted_abs(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        lw = -xs / 2 + (0.5 * f.alpha * np.log(xs) if extra else 0.0)
        return np.abs(eval_weighted(f, xs, lw))

    vals = weighted_abs(x)
    best = float(vals.max())
    if not extra:
        best = max(best, float(abs(f(0.0))))
    i = int(np.argmax(vals))
    if 0 < i < x.size - 1:
        res = optimize.minimize_scalar(
            lambda s: -weighted_abs(s)[0], bracket=(x[i - 1], x[i], x[i + 1]), method="golden"
        )
        best = max(best, -float(res.fun))
    return best


def lp_norm(f: LaguerreExpansion, p: float, mode="alpha", *, tol: float = 1e-7, normalized: bool = False) -> float:
    """||f||_{L_p(x^beta dx)} for the chosen weight regime.

    Finite p: the substitution t = p x / 2 turns the integral into one against
    t^beta e^{-t}; results are accepted once two successive refinements agree
    to ``tol``.  p = inf: sup over a log-spaced grid on (0, 8 deg] with
    golden-section refinement at the grid maximizer.
    """
    mode = BetaMode.parse(mode)
    p = float(p)
    check_admissible(f.alpha, p, mode)
    if math.isinf(p):
        return _sup(f, mode)
    beta = mode.beta(f.alpha, p)
    integral = _abs_power_integral(f, p, beta, p / 2, tol)
    if normalized:
        integral /= math.gamma(f.alpha + 1)
    return integral ** (1.0 / p)


def sobolev_space_norm(f: LaguerreExpansion, p: float, mode, S, **kw) -> float:
    """||f||_{S_p^beta}: weighted L_p part plus mass terms on f^{(j)}(0)."""
    from .laguerre import expansion_deriv_zero

    base = lp_norm(f, p, mode, **kw)
    masses = [(j, M) for j, M in enumerate(S.masses) if M > 0]
    if not masses:
        return base
    if math.isinf(float(p)):
        return max([base] + [abs(expansion_deriv_zero(f, j)) for j, _ in masses])
    total = base**p + math.fsum(M * abs(expansion_deriv_zero(f, j)) ** p for j, M in masses)
    return total ** (1.0 / p)


def probability_p_mean(f: LaguerreExpansion, p: float, *, tol: float = 1e-9) -> float:
    """(int |f|^p dmu)^{1/p} for the probability measure x^a e^{-x} dx / Gamma(a+1)."""
    integral = _abs_power_integral(f, float(p), f.alpha, 1.0, tol)
    return (integral / math.gamma(f.alpha + 1)) ** (1.0 / p)


def norm_growth_exponent(alpha: float, p: float, mode) -> float:
    """Exponent s with ||q_n||_{L_p(x^beta)} ~ n^s above the Pollard endpoint."""
    mode = BetaMode.parse(mode)
    if mode is BetaMode.ALPHA:
        return alpha / 2 - (alpha + 1) / p
    return -1.0 / p


@dataclass
class GrowthReport:
    ns: np.ndarray
    values: np.ndarray
    slope: float
    stderr: float
    r2: float
    convention: str
    log_case: bool = False
    log_correlation: float | None = None

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "stderr": self.stderr,
            "r2": self.r2,
            "convention": self.convention,
            "log_case": self.log_case,
            "log_correlation": self.log_correlation,
        }


def fit_loglog(ns, values):
    fit = stats.linregress(np.log(ns), np.log(values))
    return float(fit.slope), float(fit.stderr), float(fit.rvalue**2)


def norm_growth(cache, p: float, mode, n_grid=DEFAULT_N_GRID) -> GrowthReport:
    """||q_n||_{L_p(x^beta dx)} over n_grid with a log-log slope fit.

    At p = q_0 the report also carries the correlation of
    ||q_n||^p n^{p/4} against log(n + 1).
    """
    mode = BetaMode.parse(mode)
    p = float(p)
    ns = np.array(sorted(n_grid))
    if ns[-1] > cache.n_max:
        raise ValueError("n_grid exceeds the cache")
    values = np.array([lp_norm(cache.q(int(n)), p, mode) for n in ns])
    slope, stderr, r2 = fit_loglog(ns, values)
    conv = f"unnormalized L_p(x^beta dx), beta={'alpha' if mode is BetaMode.ALPHA else 'alpha*p/2'}"
    report = GrowthReport(ns, values, slope, stderr, r2, conv)
    try:
        _, q0 = pollard_endpoints(cache.alpha, mode)
    except DomainError:
        q0 = None
    if q0 is not None and not math.isinf(p) and math.isclose(p, q0, rel_tol=1e-12):
        y = values**p * ns ** (p / 4)
        report.log_case = True
        report.log_correlation = float(np.corrcoef(np.log(ns + 1), y)[0, 1])
    return report
