"""Experiment configuration: defaults, INI loading and validation."""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field, fields, replace

from .laguerre import check_alpha
from .norms import DEFAULT_N_GRID, BetaMode, DomainError, check_admissible

__all__ = ["Tolerances", "ExperimentConfig", "load_config", "parse_floats", "parse_p_list"]


@dataclass(frozen=True)
class Tolerances:
    orthonormality: float = 1e-9
    orthonormality_n: int = 100
    cross_validation_50: float = 1e-9
    cross_validation_150: float = 1e-7
    norm_ratio: float = 0.05
    representation_residual: float = 1e-8
    mh_ratio_low: float = 1.6
    mh_ratio_high: float = 2.4
    slope: float = 0.1
    log_correlation: float = 0.99
    g_hat_limit: float = 0.05
    vanishing: float = 1e-9
    classical: float = 1e-12
    mh_x_max: float = 30.0
    mh_points: int = 600
    zero_count_x_min: float = 1.0
    rounding_floor: float = 1e-13


def parse_floats(text: str) -> tuple[float, ...]:
    text = text.strip().strip("()[]")
    if not text:
        return ()
    return tuple(float(t) for t in text.split(",") if t.strip())


def parse_p_list(text: str) -> tuple[float, ...]:
    out = []
    for t in text.split(","):
        t = t.strip().lower()
        if not t:
            continue
        out.append(math.inf if t in ("inf", "infinity", "∞") else float(t))
    return tuple(out)


def _fmt_p(p: float) -> str:
    return "inf" if math.isinf(p) else repr(float(p))


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float = 0.0
    masses: tuple[float, ...] = ()
    n_max: int = 200
    n_grid: tuple[int, ...] = DEFAULT_N_GRID
    p_list: tuple[float, ...] = (6.0, 8.0, math.inf)
    mode: BetaMode = BetaMode.ALPHA
    tolerances: Tolerances = field(default_factory=Tolerances)

    def validate(self) -> "ExperimentConfig":
        """Run every admissibility check before any computation."""
        check_alpha(self.alpha)
        if any(not (m >= 0 and math.isfinite(m)) for m in self.masses):
            raise DomainError("masses must be finite and nonnegative")
        if self.n_max < 8:
            raise DomainError("n_max must be at least 8")
        if not self.n_grid or min(self.n_grid) < 1 or max(self.n_grid) > self.n_max:
            raise DomainError(f"n_grid must lie in [1, n_max={self.n_max}]")
        if len(self.n_grid) < 4:
            raise DomainError("n_grid needs at least 4 points")
        for p in self.p_list:
            check_admissible(self.alpha, p, self.mode)
        return self

    def header_items(self) -> list[tuple[str, str]]:
        items = [
            ("alpha", repr(float(self.alpha))),
            ("masses", ",".join(repr(float(m)) for m in self.masses)),
            ("n_max", str(self.n_max)),
            ("n_grid", ",".join(str(n) for n in self.n_grid)),
            ("p", ",".join(_fmt_p(p) for p in self.p_list)),
            ("mode", self.mode.value),
        ]
        items += [(k, repr(v)) for k, v in asdict(self.tolerances).items()]
        return items

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def load_config(path) -> ExperimentConfig:
    """Read an INI file with [experiment] and optional [tolerances] sections."""
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    cfg = ExperimentConfig()
    kw = {}
    if parser.has_section("experiment"):
        sec = parser["experiment"]
        unknown = set(sec) - {"alpha", "masses", "n_max", "n_grid", "p", "mode"}
        if unknown:
            raise ValueError(f"unknown experiment keys: {sorted(unknown)}")
        if "alpha" in sec:
            kw["alpha"] = float(sec["alpha"])
        if "masses" in sec:
            kw["masses"] = parse_floats(sec["masses"])
        if "n_max" in sec:
            kw["n_max"] = int(sec["n_max"])
        if "n_grid" in sec:
            kw["n_grid"] = tuple(int(v) for v in parse_floats(sec["n_grid"]))
        if "p" in sec:
            kw["p_list"] = parse_p_list(sec["p"])
        if "mode" in sec:
            kw["mode"] = BetaMode.parse(sec["mode"])
    if parser.has_section("tolerances"):
        names = {f.name: f.type for f in fields(Tolerances)}
        tol = {}
        for key, value in parser["tolerances"].items():
            if key not in names:
                raise ValueError(f"unknown tolerance {key!r}")
            tol[key] = int(value) if names[key] in (int, "int") else float(value)
        kw["tolerances"] = replace(cfg.tolerances, **tol)
    return replace(cfg, **kw)
