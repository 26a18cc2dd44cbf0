"""Verdict registry: one named, tolerance-carrying check per asymptotic statement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import (
    limit_diagnose,
    limit_profile,
    mh_profile_sobolev,
    sign_changes,
    sup_deviation,
)
from .cohen import (
    PARTIAL_SUMS,
    build_test_function,
    choose_j,
    cohen_exponent,
    cohen_lower_bound,
    fourier_coeff,
    g_hat_exact,
)
from .config import Tolerances
from .laguerre import deriv_scale, expansion_deriv_zero, log_gamma, norm_sq_L, LaguerreExpansion
from .norms import BetaMode, DomainError, fit_loglog, norm_growth, norm_growth_exponent, pollard_endpoints
from .sobolev import SobolevBasisCache, build_gram_oracle, q_deriv_ratio, representation_residual

__all__ = ["CHECKS", "Verdict", "extrapolation_grid", "run_check"]

CHECKS = {
    "orthonormality": "q_i are orthonormal in the discrete Sobolev product",
    "construction_agreement": "stagewise and Gram-oracle constructions agree",
    "derivative_ratio_rate": "q_n^(k)(0)/l_n^(k)(0) decays like n^-(a+2k+1) at masses, stays order one at gaps",
    "norm_ratio_limit": "<Q_n,Q_n>_S / ||L_n||^2 tends to 1",
    "connection_limits": "b_j(n) limits vanish below the first gap and not at it",
    "mehler_heine": "q_n(x/n)/n^(a/2) converges to the Bessel-type limit at rate 1/n",
    "zero_structure": "sign changes of the scaled profile match the limit away from the origin",
    "norm_growth_slope": "||q_n||_p grows with the sharp exponent above the Pollard endpoint",
    "norm_growth_log_case": "||q_n||_q0^q0 n^(q0/4) grows like log(n+1)",
    "cohen_slope": "Cohen lower bound grows with the theoretical exponent",
    "cohen_endpoint_divergence": "Cohen lower bound increases at p = q_0",
    "test_function_identities": "g_n^(a,j) has one surviving Fourier coefficient and vanishing derivatives",
    "classical_degeneration": "no masses reproduce l_n exactly",
}


@dataclass
class Verdict:
    check_name: str
    passed: bool | None  # None: not applicable for this configuration
    measured: object
    expected: object
    tolerance: object
    label: str = ""
    note: str = ""

    def __post_init__(self):
        if self.passed is not None:
            self.passed = bool(self.passed)

    @property
    def status(self) -> str:
        return "n/a" if self.passed is None else ("pass" if self.passed else "fail")

    def as_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "status": self.status,
            "passed": _jsonable(self.passed),
            "measured": _jsonable(self.measured),
            "expected": _jsonable(self.expected),
            "tolerance": _jsonable(self.tolerance),
            "label": self.label,
            "note": self.note,
        }


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "inf" if math.isinf(v) else v
    return v


def extrapolation_grid(cache: SobolevBasisCache) -> list[int]:
    top = cache.n_max
    step = max(top // 8, 1)
    return [n for n in range(top // 4, top + 1, step) if n >= cache.product.N + 2]


def _label(cache) -> str:
    S = cache.product
    return f"alpha={S.alpha:g} masses={tuple(S.masses)}"


def check_orthonormality(cache, tol: Tolerances, n: int | None = None) -> Verdict:
    n = min(tol.orthonormality_n if n is None else n, cache.n_max)
    S = cache.product
    C = np.stack([np.pad(cache.coeffs[i][: i + 1], (0, n + 1 - (i + 1))) for i in range(n + 1)])
    G = C @ C.T
    for j in S.positive:
        d = cache.derivs[: n + 1, j]
        G = G + S.masses[j] * np.outer(d, d)
    off = float(np.max(np.abs(G - np.diag(np.diag(G)))))
    diag = float(np.max(np.abs(np.diag(G) - 1)))
    worst = max(off, diag)
    return Verdict("orthonormality", worst <= tol.orthonormality,
                   {"offdiag": off, "diag": diag, "n": n}, 0.0, tol.orthonormality, _label(cache))


def check_construction_agreement(cache, tol: Tolerances, oracle=None) -> Verdict:
    n_top = min(150, cache.n_max)
    if oracle is None:
        oracle = build_gram_oracle(cache.product, n_top)
    devs = []
    for n in range(n_top + 1):
        devs.append(float(np.max(np.abs(cache.coeffs[n][: n + 1] - oracle.coeffs[n][: n + 1]))))
    d50 = max(devs[: min(50, n_top) + 1])
    d150 = max(devs)
    ok = d50 <= tol.cross_validation_50 and d150 <= tol.cross_validation_150
    return Verdict("construction_agreement", ok, {"n<=50": d50, "n<=150": d150}, 0.0,
                   {"n<=50": tol.cross_validation_50, "n<=150": tol.cross_validation_150}, _label(cache))


def check_derivative_ratio_rate(cache, tol: Tolerances) -> Verdict:
    S = cache.product
    ns = extrapolation_grid(cache)
    measured, ok = {}, True
    for k in range(S.N + 2):
        mass = S.masses[k] if k < len(S.masses) else 0.0
        e = S.alpha + 2 * k + 1 if mass > 0 else 0.0
        d = limit_diagnose([(n, n**e * q_deriv_ratio(cache, k, n)) for n in ns])
        good = d.nonzero and (d.trend_ok if mass > 0 else True)
        ok &= good
        measured[f"k={k}"] = {"rescale": e, "estimate": d.estimate, "residual": d.residual,
                              "trend_ok": d.trend_ok, "nonzero": d.nonzero}
    return Verdict("derivative_ratio_rate", ok, measured, "nonzero stabilized limits",
                   "|L| > 50 residual", _label(cache))


def check_norm_ratio_limit(cache, tol: Tolerances) -> Verdict:
    a = cache.alpha
    top = cache.n_max
    low = min(50, top)
    dev_top = abs(cache.norm_sq_Q[top] / norm_sq_L(a, top) - 1)
    dev_low = abs(cache.norm_sq_Q[low] / norm_sq_L(a, low) - 1)
    # both at rounding level means the ratio is identically one (no masses)
    exact = max(dev_top, dev_low) <= tol.rounding_floor
    ok = dev_top <= tol.norm_ratio and (dev_top < dev_low or exact)
    return Verdict("norm_ratio_limit", ok, {f"n={top}": dev_top, f"n={low}": dev_low}, 0.0,
                   tol.norm_ratio, _label(cache))


def check_connection_limits(cache, tol: Tolerances) -> Verdict:
    S = cache.product
    ns = extrapolation_grid(cache)
    gap = S.first_gap
    measured, ok = {}, True
    for j in range(S.N + 2):
        d = limit_diagnose([(n, cache.b[n, j]) for n in ns])
        measured[f"b_{j}"] = {"estimate": d.estimate, "residual": d.residual, "nonzero": d.nonzero}
        if j < gap:
            ok &= not d.nonzero
        elif j == gap:
            ok &= d.nonzero
    res = max(representation_residual(cache, n) for n in ns)
    measured["representation_residual"] = res
    ok &= res <= tol.representation_residual
    return Verdict("connection_limits", ok, measured, {"first_nonzero": gap},
                   {"representation_residual": tol.representation_residual}, _label(cache))


def _grid(tol: Tolerances):
    return np.linspace(0.0, tol.mh_x_max, tol.mh_points)


def mh_deviations(cache, tol: Tolerances, ns=None):
    xs = _grid(tol)
    limit = limit_profile(cache)
    lv = limit(xs)
    top = cache.n_max
    ns = ns or (top // 4, top // 2, top)
    return {n: sup_deviation(mh_profile_sobolev(cache, n, xs), lv) for n in ns}, limit


def check_mehler_heine(cache, tol: Tolerances) -> Verdict:
    top = cache.n_max
    devs, limit = mh_deviations(cache, tol)
    d_low, d_mid, d_top = devs[top // 4], devs[top // 2], devs[top]
    ratio = d_mid / d_top
    ok = d_top < d_low and tol.mh_ratio_low <= ratio <= tol.mh_ratio_high
    return Verdict("mehler_heine", ok, {"deviations": {str(k): v for k, v in devs.items()}, "ratio": ratio,
                                        "b_limits": list(limit.b_limits)},
                   "O(1/n)", [tol.mh_ratio_low, tol.mh_ratio_high], _label(cache))


def check_zero_structure(cache, tol: Tolerances) -> Verdict:
    xs = _grid(tol)
    xs = xs[xs >= tol.zero_count_x_min]
    limit = limit_profile(cache)
    a = sign_changes(mh_profile_sobolev(cache, cache.n_max, xs))
    b = sign_changes(limit(xs))
    return Verdict("zero_structure", a == b, a, b, 0, _label(cache),
                   f"counted on [{tol.zero_count_x_min:g}, {tol.mh_x_max:g}]")


NORM_CASES = ((BetaMode.ALPHA, math.inf), (BetaMode.PALPHA2, 6.0), (BetaMode.PALPHA2, 8.0),
              (BetaMode.PALPHA2, math.inf))


def check_norm_growth_slope(cache, tol: Tolerances, n_grid, cases=NORM_CASES) -> Verdict:
    measured, ok, any_case = {}, True, False
    for mode, p in cases:
        key = f"{mode.value},p={p:g}"
        try:
            _, q0 = pollard_endpoints(cache.alpha, mode)
            if not p > q0:
                measured[key] = "n/a: p not above q_0"
                continue
            r = norm_growth(cache, p, mode, n_grid)
        except DomainError as exc:
            measured[key] = f"n/a: {exc}"
            continue
        any_case = True
        expected = norm_growth_exponent(cache.alpha, p, mode)
        good = abs(r.slope - expected) <= tol.slope
        ok &= good
        measured[key] = {"slope": r.slope, "expected": expected, "r2": r.r2}
    return Verdict("norm_growth_slope", ok if any_case else None, measured, "sharp exponent", tol.slope,
                   _label(cache))


def check_norm_growth_log_case(cache, tol: Tolerances, n_grid) -> Verdict:
    measured, ok, any_case = {}, True, False
    for mode in BetaMode:
        try:
            _, q0 = pollard_endpoints(cache.alpha, mode)
            r = norm_growth(cache, q0, mode, n_grid)
        except DomainError as exc:
            measured[mode.value] = f"n/a: {exc}"
            continue
        any_case = True
        ok &= r.log_correlation > tol.log_correlation
        measured[mode.value] = {"q0": q0, "correlation": r.log_correlation}
    return Verdict("norm_growth_log_case", ok if any_case else None, measured, "> threshold",
                   tol.log_correlation, _label(cache))


def cohen_sweep(cache, p, mode, n_grid, c=PARTIAL_SUMS):
    return [cohen_lower_bound(int(n), None, p, mode, c, cache, detail=True) for n in n_grid]


def check_cohen_slope(cache, tol: Tolerances, n_grid, p_list=(6.0, 8.0, math.inf)) -> Verdict:
    measured, ok, any_case = {}, True, False
    for mode in BetaMode:
        for p in p_list:
            key = f"{mode.value},p={p:g}"
            try:
                _, q0 = pollard_endpoints(cache.alpha, mode)
                if not p > q0:
                    measured[key] = "n/a: p inside the Pollard interval"
                    continue
                rows = cohen_sweep(cache, p, mode, n_grid)
            except DomainError as exc:
                measured[key] = f"n/a: {exc}"
                continue
            any_case = True
            slope, _, _ = fit_loglog(n_grid, [r["bound"] for r in rows])
            expected = cohen_exponent(cache.alpha, p, mode)
            ok &= abs(slope - expected) <= tol.slope
            measured[key] = {"slope": slope, "expected": expected}
    return Verdict("cohen_slope", ok if any_case else None, measured, "theoretical exponent", tol.slope,
                   _label(cache))


def check_cohen_endpoint(cache, tol: Tolerances, n_grid) -> Verdict:
    measured, ok, any_case = {}, True, False
    for mode in BetaMode:
        try:
            _, q0 = pollard_endpoints(cache.alpha, mode)
            rows = cohen_sweep(cache, q0, mode, n_grid)
        except DomainError as exc:
            measured[mode.value] = f"n/a: {exc}"
            continue
        any_case = True
        tail = [r["bound"] for r in rows][-4:]
        inc = bool(np.all(np.diff(tail) > 0))
        ok &= inc
        measured[mode.value] = {"q0": q0, "last4": tail, "increasing": inc}
    return Verdict("cohen_endpoint_divergence", ok if any_case else None, measured, "increasing", "strict",
                   _label(cache))


def check_test_function_identities(cache, tol: Tolerances, n_grid, p: float = math.inf) -> Verdict:
    S = cache.product
    a = S.alpha
    j = choose_j(a, S.N, p)
    vanish = deriv = xcheck = 0.0
    seq = []
    for n in n_grid:
        n = int(n)
        g = build_test_function(a, S, n, j).expansion
        g_n = fourier_coeff(g, n, cache)
        exact = g_hat_exact(a, n, j, cache)
        xcheck = max(xcheck, abs(g_n / exact - 1))
        for k in range(n):
            vanish = max(vanish, abs(fourier_coeff(g, k, cache)) / abs(g_n))
        plain = LaguerreExpansion(a, g.coeffs)
        for i in range(S.N + 1):
            deriv = max(deriv, abs(expansion_deriv_zero(plain, i)) / deriv_scale(g, i))
        seq.append((n, exact * math.exp(0.5 * log_gamma(a + 1)) / n ** (j + a / 2)))
    d = limit_diagnose(seq)
    ok = (vanish <= tol.vanishing and deriv <= tol.vanishing and xcheck <= tol.vanishing
          and abs(d.estimate - 1) <= tol.g_hat_limit)
    return Verdict("test_function_identities", ok,
                   {"j": j, "max_relative_g_hat_k<n": vanish, "max_relative_derivative": deriv,
                    "quadrature_vs_exact_g_hat": xcheck, "normalized_g_hat_limit": d.estimate},
                   {"normalized_g_hat_limit": 1.0},
                   {"relative": tol.vanishing, "limit": tol.g_hat_limit}, _label(cache))


def check_classical_degeneration(cache, tol: Tolerances) -> Verdict:
    if cache.product.positive:
        return Verdict("classical_degeneration", None, None, None, tol.classical, _label(cache),
                       "needs masses = ()")
    dev = 0.0
    for n in range(cache.n_max + 1):
        e = np.zeros(n + 1)
        e[n] = 1.0
        dev = max(dev, float(np.max(np.abs(cache.coeffs[n][: n + 1] - e))))
    return Verdict("classical_degeneration", dev <= tol.classical, dev, 0.0, tol.classical, _label(cache))


def run_check(name: str, cache, tol: Tolerances, n_grid=None, **kw) -> Verdict:
    n_grid = list(n_grid) if n_grid is not None else [n for n in range(25, cache.n_max + 1, 25)]
    table = {
        "orthonormality": lambda: check_orthonormality(cache, tol),
        "construction_agreement": lambda: check_construction_agreement(cache, tol, kw.get("oracle")),
        "derivative_ratio_rate": lambda: check_derivative_ratio_rate(cache, tol),
        "norm_ratio_limit": lambda: check_norm_ratio_limit(cache, tol),
        "connection_limits": lambda: check_connection_limits(cache, tol),
        "mehler_heine": lambda: check_mehler_heine(cache, tol),
        "zero_structure": lambda: check_zero_structure(cache, tol),
        "norm_growth_slope": lambda: check_norm_growth_slope(cache, tol, n_grid),
        "norm_growth_log_case": lambda: check_norm_growth_log_case(cache, tol, n_grid),
        "cohen_slope": lambda: check_cohen_slope(cache, tol, n_grid, kw.get("p_list", (6.0, 8.0, math.inf))),
        "cohen_endpoint_divergence": lambda: check_cohen_endpoint(cache, tol, n_grid),
        "test_function_identities": lambda: check_test_function_identities(cache, tol, n_grid),
        "classical_degeneration": lambda: check_classical_degeneration(cache, tol),
    }
    if name not in table:
        raise KeyError(f"unknown check {name!r}")
    return table[name]()


def norm_growth_verdict(cache, report, p: float, mode: BetaMode, tol: Tolerances) -> Verdict:
    """Verdict for one GrowthReport: slope above q_0, log correlation at q_0."""
    label = f"{_label(cache)} mode={mode.value} p={p:g}"
    try:
        _, q0 = pollard_endpoints(cache.alpha, mode)
    except DomainError as exc:
        return Verdict("norm_growth_slope", None, report.slope, None, tol.slope, label, str(exc))
    if report.log_case:
        return Verdict("norm_growth_log_case", report.log_correlation > tol.log_correlation,
                       report.log_correlation, "> threshold", tol.log_correlation, label)
    if p > q0:
        expected = norm_growth_exponent(cache.alpha, p, mode)
        return Verdict("norm_growth_slope", abs(report.slope - expected) <= tol.slope, report.slope,
                       expected, tol.slope, label)
    return Verdict("norm_growth_slope", None, report.slope, None, tol.slope, label,
                   "p below q_0: reported only")


def cohen_regime(alpha: float, p: float, mode: BetaMode) -> str:
    """'divergent' (p > q_0), 'endpoint' (p = q_0), 'pollard' (p_0 <= p < q_0), 'duality' (p < p_0)."""
    p0, q0 = pollard_endpoints(alpha, mode)
    if math.isclose(p, q0, rel_tol=1e-12):
        return "endpoint"
    if p > q0:
        return "divergent"
    if p < p0 and not math.isclose(p, p0, rel_tol=1e-12):
        return "duality"
    return "pollard"


def cohen_verdict(cache, rows, p: float, mode: BetaMode, tol: Tolerances) -> Verdict:
    label = f"{_label(cache)} mode={mode.value} p={p:g}"
    regime = cohen_regime(cache.alpha, p, mode)
    if regime == "duality":
        return Verdict("cohen_slope", None, None, None, tol.slope, label, "by duality, not computed")
    ns = [r["n"] for r in rows]
    bounds = [r["bound"] for r in rows]
    if regime == "endpoint":
        inc = bool(np.all(np.diff(bounds[-4:]) > 0))
        return Verdict("cohen_endpoint_divergence", inc, bounds[-4:], "increasing", "strict", label)
    slope, _, _ = fit_loglog(ns, bounds)
    if regime == "divergent":
        expected = cohen_exponent(cache.alpha, p, mode)
        return Verdict("cohen_slope", abs(slope - expected) <= tol.slope, slope, expected, tol.slope, label)
    return Verdict("cohen_slope", None, slope, None, tol.slope, label,
                   "inside the Pollard interval: no divergence asserted")
