"""Command-line front end writing CSV reports, JSON sidecars and verdicts."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import limit_profile, mh_profile_sobolev
from .checks import (
    check_classical_degeneration,
    check_connection_limits,
    check_construction_agreement,
    check_derivative_ratio_rate,
    check_mehler_heine,
    check_norm_ratio_limit,
    check_orthonormality,
    check_test_function_identities,
    check_zero_structure,
    cohen_regime,
    cohen_verdict,
    extrapolation_grid,
    norm_growth_verdict,
)
from .cohen import PARTIAL_SUMS, cohen_exponent, cohen_lower_bound
from .config import ExperimentConfig, load_config, parse_floats, parse_p_list
from .laguerre import norm_sq_L
from .norms import BetaMode, DomainError, norm_growth, norm_growth_exponent, pollard_endpoints
from .sobolev import SobolevProduct, build_stagewise, q_deriv_ratio

REPORT_FORMAT = "laguerre-sobolev-report v1"
VERBS = ("basis", "mh", "ratios", "norms", "cohen", "all")


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.17g" % v


def write_csv(path: Path, config: ExperimentConfig, columns, rows) -> None:
    lines = [f"# {REPORT_FORMAT} (package {__version__})"]
    lines += [f"# {k} = {v}" for k, v in config.header_items()]
    lines.append(",".join(columns))
    lines += [",".join(fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


class Run:
    """One CLI invocation: config, lazily built cache, collected verdicts."""

    def __init__(self, config: ExperimentConfig, out: Path):
        self.config = config
        self.out = out
        self.verdicts = []
        self._cache = None

    @property
    def cache(self):
        if self._cache is None:
            S = SobolevProduct(self.config.alpha, self.config.masses)
            self._cache = build_stagewise(S, self.config.n_max)
        return self._cache

    def add(self, v):
        self.verdicts.append(v)


def cmd_basis(run: Run) -> None:
    cache, tol = run.cache, run.config.tolerances
    (run.out / "basis.json").write_text(cache.to_json() + "\n", encoding="utf-8")
    K = cache.product.N + 2
    rows = []
    for n in range(cache.n_max + 1):
        ratio = cache.norm_sq_Q[n] / norm_sq_L(cache.alpha, n)
        rows.append([n, ratio] + [("nan" if np.isnan(v) else v) for v in cache.b[n, :K]])
    write_csv(run.out / "basis_summary.csv", run.config, ["n", "norm_ratio"] + [f"b_{j}" for j in range(K)], rows)
    run.add(check_orthonormality(cache, tol))
    run.add(check_construction_agreement(cache, tol))
    run.add(check_norm_ratio_limit(cache, tol))
    run.add(check_connection_limits(cache, tol))
    if not cache.product.positive:
        run.add(check_classical_degeneration(cache, tol))


def cmd_mh(run: Run) -> None:
    cache, tol = run.cache, run.config.tolerances
    xs = np.linspace(0.0, tol.mh_x_max, tol.mh_points)
    limit = limit_profile(cache)
    lv = limit(xs)
    top = cache.n_max
    for n in (top // 4, top // 2, top):
        prof = mh_profile_sobolev(cache, n, xs)
        rows = [[x, p, l, abs(p - l)] for x, p, l in zip(xs, prof, lv)]
        write_csv(run.out / f"mh_n{n}.csv", run.config, ["x", "profile_n", "limit", "abs_error"], rows)
    write_json(run.out / "mh_limit.json", {"alpha": cache.alpha, "b_limits": list(limit.b_limits)})
    run.add(check_mehler_heine(cache, tol))
    run.add(check_zero_structure(cache, tol))


def cmd_ratios(run: Run) -> None:
    cache, tol = run.cache, run.config.tolerances
    S = cache.product
    rows = []
    for n in range(S.N + 2, cache.n_max + 1):
        for k in range(S.N + 2):
            mass = S.masses[k] if k < len(S.masses) else 0.0
            e = S.alpha + 2 * k + 1 if mass > 0 else 0.0
            r = q_deriv_ratio(cache, k, n)
            rows.append([n, k, r, n**e * r])
    write_csv(run.out / "deriv_ratios.csv", run.config, ["n", "k", "ratio", "rescaled"], rows)
    write_json(run.out / "deriv_ratios.json", {"extrapolation_grid": extrapolation_grid(cache)})
    run.add(check_derivative_ratio_rate(cache, tol))
    run.add(check_norm_ratio_limit(cache, tol))


def _p_tag(p: float) -> str:
    return "inf" if math.isinf(p) else ("%g" % p).replace(".", "_")


def cmd_norms(run: Run) -> None:
    cfg = run.config
    cache, mode = run.cache, cfg.mode
    for p in cfg.p_list:
        report = norm_growth(cache, p, mode, cfg.n_grid)
        stem = f"norms_{mode.value}_p{_p_tag(p)}"
        write_csv(run.out / f"{stem}.csv", cfg, ["n", "value"], list(zip(report.ns, report.values)))
        side = report.as_dict()
        side["p"] = fmt(p)
        side["theoretical_exponent"] = norm_growth_exponent(cache.alpha, p, mode)
        write_json(run.out / f"{stem}.json", side)
        run.add(norm_growth_verdict(cache, report, p, mode, cfg.tolerances))


def cmd_cohen(run: Run) -> None:
    cfg = run.config
    cache, mode = run.cache, cfg.mode
    for p in cfg.p_list:
        stem = f"cohen_{mode.value}_p{_p_tag(p)}"
        try:
            regime = cohen_regime(cache.alpha, p, mode)
        except DomainError as exc:
            write_json(run.out / f"{stem}.json", {"p": fmt(p), "status": f"not applicable: {exc}"})
            continue
        if regime == "duality":
            write_json(run.out / f"{stem}.json", {"p": fmt(p), "status": "by duality, not computed"})
            run.add(cohen_verdict(cache, [], p, mode, cfg.tolerances))
            continue
        rows = [cohen_lower_bound(int(n), None, p, mode, PARTIAL_SUMS, cache, detail=True) for n in cfg.n_grid]
        cols = ["n", "p", "mode", "j", "g_norm", "g_hat_n", "q_norm", "bound"]
        write_csv(run.out / f"{stem}.csv", cfg, cols, [[r[c] for c in cols] for r in rows])
        verdict = cohen_verdict(cache, rows, p, mode, cfg.tolerances)
        write_json(run.out / f"{stem}.json", {
            "p": fmt(p), "mode": mode.value, "regime": regime,
            "pollard_endpoints": list(pollard_endpoints(cache.alpha, mode)),
            "slope": verdict.measured if verdict.check_name == "cohen_slope" else None,
            "theoretical_exponent": cohen_exponent(cache.alpha, p, mode),
        })
        run.add(verdict)
    run.add(check_test_function_identities(cache, cfg.tolerances, cfg.n_grid))


COMMANDS = {"basis": cmd_basis, "mh": cmd_mh, "ratios": cmd_ratios, "norms": cmd_norms, "cohen": cmd_cohen}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="laguerre-sobolev", description=__doc__)
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--masses", help="comma list M_0,...,M_N (empty for none)")
    ap.add_argument("--nmax", type=int)
    ap.add_argument("--ngrid", help="comma list of n values")
    ap.add_argument("--p", help='comma list of exponents, "inf" allowed')
    ap.add_argument("--mode", choices=[m.value for m in BetaMode])
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--config", help="INI file with [experiment] and [tolerances] sections")
    return ap


def config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg = cfg.with_overrides(
        alpha=args.alpha,
        masses=parse_floats(args.masses) if args.masses is not None else None,
        n_max=args.nmax,
        n_grid=tuple(int(v) for v in parse_floats(args.ngrid)) if args.ngrid else None,
        p_list=parse_p_list(args.p) if args.p else None,
        mode=BetaMode.parse(args.mode) if args.mode else None,
    )
    if args.nmax is not None and not args.ngrid and max(cfg.n_grid) > cfg.n_max:
        step = max(cfg.n_max // 8, 1)
        cfg = cfg.with_overrides(n_grid=tuple(range(step, cfg.n_max + 1, step)))
    return cfg.validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (DomainError, ValueError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    run = Run(cfg, out)
    verbs = list(COMMANDS) if args.verb == "all" else [args.verb]
    for verb in verbs:
        try:
            COMMANDS[verb](run)
        except Exception as exc:
            print(f"error: {verb} ({type(exc).__module__}.{type(exc).__name__}): {exc}", file=sys.stderr)
            return 2
    write_json(out / f"verdicts_{args.verb}.json", [v.as_dict() for v in run.verdicts])
    for v in run.verdicts:
        print(f"{v.status:4}  {v.check_name:28} {v.label} {v.note}".rstrip())
    return 0 if all(v.passed is not False for v in run.verdicts) else 1


if __name__ == "__main__":
    sys.exit(main())
