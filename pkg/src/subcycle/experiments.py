"""
Sweeps, refinement studies and artifact emission.

Configuration is a single JSON object; every key is optional and the
defaults reproduce the standard product-vs-r sweep. Frequencies may be given
in any consistent user units through ``sigma``; the core works at sigma = 1.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .detector import (
    DT_CONVENTIONS,
    DetectorParams,
    LIMIT_PRODUCT,
    beamsplitter_output,
    interaction_duration,
)
from .errors import ConfigError
from .gaussian_mode import (
    GaussianModeParams,
    gaussian_spectrum,
    split_closed_form,
    vacuum_moments,
)
from .spectral import build_grid, mode_norm

CSV_HEADER = ("r", "theta_g", "n_g", "abs_m", "n2", "delta_E", "delta_t", "product", "flags")
FORMATS = ("csv", "svg", "both")
OUT_DIR_ENV = "SUBCYCLE_OUT_DIR"

# 41 points, ten per decade, from 1e-3 to 10
DEFAULT_R_VALUES = tuple(float(10.0 ** (k / 10)) for k in range(-30, 11))


def _positive(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if not (value > 0 and math.isfinite(value)):
        raise ConfigError(f"{name} must be positive and finite, got {value!r}")
    return float(value)


def _ladder(name, values, kind=float):
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"{name} must be a non-empty list")
    out = tuple(kind(_positive(name, v)) for v in values)
    if kind is int and any(int(v) != v for v in values):
        raise ConfigError(f"{name} entries must be integers")
    return out


@dataclass(frozen=True)
class GridSettings:
    panels: int = 64
    order: int = 16
    cutoff_sigmas: float = 12.0


@dataclass(frozen=True)
class DynamicsSettings:
    ratios: tuple = (5.0, 10.0, 25.0, 50.0)
    panels: int = 32
    order: int = 16
    rtol: float = 1e-8
    scheme: str = "cf4"


@dataclass(frozen=True)
class ConvergenceSettings:
    r: float = 1.0
    quadrature_panels: tuple = (16, 32, 64)
    quadrature_order: int = 2
    bin_counts: tuple = (256, 1024, 4096)
    bin_order: int = 2
    step_ratio: float = 5.0
    step_ladder: tuple = (500, 1000, 2000, 4000, 8000)


@dataclass(frozen=True)
class LimitSettings:
    ladder: tuple = (1e-2, 1e-3, 1e-4)
    tol: float = 1e-6


@dataclass(frozen=True)
class SweepConfig:
    r_values: tuple = DEFAULT_R_VALUES
    theta_u: float = math.pi / 2
    dt_convention: str = "stddev"
    hbar: float = 1.0
    sigma: float = 1.0
    grid: GridSettings = field(default_factory=GridSettings)
    dynamics: DynamicsSettings | None = field(default_factory=DynamicsSettings)
    convergence: ConvergenceSettings = field(default_factory=ConvergenceSettings)
    limit: LimitSettings = field(default_factory=LimitSettings)
    out_dir: str = "out"
    format: str = "csv"

    def __post_init__(self):
        _ladder("r_values", self.r_values)
        if not math.isfinite(self.theta_u):
            raise ConfigError("theta_u must be finite")
        if self.dt_convention not in DT_CONVENTIONS:
            raise ConfigError(f"dt_convention must be one of {DT_CONVENTIONS}")
        _positive("hbar", self.hbar)
        _positive("sigma", self.sigma)
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.dynamics is not None and self.dynamics.scheme not in ("cf4", "midpoint"):
            raise ConfigError("dynamics.scheme must be 'cf4' or 'midpoint'")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        known = {f.name for f in fields(cls)} | {"omega0_values"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "omega0_values" in data:
            if "r_values" in data:
                raise ConfigError("give r_values or omega0_values, not both")
            sigma = _positive("sigma", data.get("sigma", 1.0))
            data["r_values"] = [w / sigma for w in _ladder("omega0_values", data.pop("omega0_values"))]
        kw = {}
        for key, value in data.items():
            if key == "r_values":
                kw[key] = _ladder(key, value)
            elif key in ("theta_u", "hbar", "sigma"):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"{key} must be a number")
                kw[key] = float(value)
            elif key == "grid":
                kw[key] = _section(GridSettings, key, value)
            elif key == "dynamics":
                kw[key] = None if value is None else _section(DynamicsSettings, key, value)
            elif key == "convergence":
                kw[key] = _section(ConvergenceSettings, key, value)
            elif key == "limit":
                kw[key] = _section(LimitSettings, key, value)
            else:
                if not isinstance(value, str):
                    raise ConfigError(f"{key} must be a string")
                kw[key] = value
        return cls(**kw)

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(data)


_INT_FIELDS = {"panels", "order", "quadrature_order", "bin_order"}
_INT_LADDERS = {"quadrature_panels", "bin_counts", "step_ladder"}
_FLOAT_LADDERS = {"ratios", "ladder"}


def _section(kind, name, value):
    if not isinstance(value, dict):
        raise ConfigError(f"{name} must be a JSON object")
    allowed = {f.name for f in fields(kind)}
    unknown = set(value) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {name}: {sorted(unknown)}")
    kw = {}
    for key, v in value.items():
        label = f"{name}.{key}"
        if key == "scheme":
            kw[key] = v
        elif key in _INT_LADDERS:
            kw[key] = _ladder(label, v, int)
        elif key in _FLOAT_LADDERS:
            kw[key] = _ladder(label, v)
        elif key in _INT_FIELDS:
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"{label} must be a positive integer")
            kw[key] = v
        else:
            kw[key] = _positive(label, v)
    return kind(**kw)


@dataclass(frozen=True)
class SweepRow:
    r: float
    theta_g: float
    n_g: float
    abs_m: float
    n2: float
    delta_E: float
    delta_t: float
    product: float
    flags: str

    def as_row(self) -> tuple:
        return tuple(getattr(self, f) for f in CSV_HEADER)


def sweep_row(r: float, cfg: SweepConfig) -> SweepRow:
    """One sweep entry; energies and times in user units, ``hbar`` restored."""
    p = GaussianModeParams(omega0=r)
    split = split_closed_form(p)
    mode = vacuum_moments(split)
    out = beamsplitter_output(cfg.theta_u, mode)
    # sigma = 1 internally: omega0 = r sigma_user, delta_t = dt(sigma=1)/sigma_user
    delta_E = cfg.hbar * r * cfg.sigma * math.sqrt(out.var)
    delta_t = interaction_duration(1.0, cfg.dt_convention) / cfg.sigma
    flags = [p.regime, cfg.dt_convention]
    if split.underflow:
        flags.append("underflow")
    return SweepRow(r, split.theta_g, mode.n, mode.abs_m, mode.n2, delta_E, delta_t,
                    delta_E * delta_t, "|".join(flags))


def run_sweep(cfg: SweepConfig) -> list:
    """One row per ``r`` in configuration order; rows are independent."""
    return [sweep_row(r, cfg) for r in cfg.r_values]


@dataclass(frozen=True)
class ConvergenceReport:
    """Error against refinement level for each study.

    ``tables`` maps a study name to ``(level, error)`` pairs; ``magnus`` holds
    the full deviation rows when dynamics are enabled.
    """

    tables: dict
    magnus: tuple = ()

    def rows(self):
        for name, pairs in self.tables.items():
            for level, err in pairs:
                yield name, level, err


def quadrature_study(r: float, panels, order: int):
    """Error of the positive-frequency self-norm ``cosh^2 theta_g`` as panels grow.

    The full signed norm is even in frequency and converges to roundoff at
    any order, so the positive part is the informative refinement measure.
    """
    p = GaussianModeParams(omega0=r)
    exact = split_closed_form(p).cosh2
    out = []
    for k in panels:
        f = gaussian_spectrum(p, build_grid(r + 12.0, k, order))
        pos = f.positive_part()
        out.append((k, float(abs(mode_norm(pos).norm - exact))))
    return out


def bin_study(r: float, bin_counts, order: int):
    """Error of the binned ``n_g`` against the closed form as the bin count grows."""
    from .dynamics import discretize_mode, wick_moments_discrete

    p = GaussianModeParams(omega0=r)
    exact = split_closed_form(p).sinh2
    out = []
    for K in bin_counts:
        if K % order:
            raise ConfigError(f"bin count {K} is not a multiple of the order {order}")
        grid = build_grid(r + 12.0, K // order, order)
        mode = discretize_mode(p, grid, tol=1.0)
        out.append((K, float(abs(wick_moments_discrete(mode).n - exact))))
    return out


def step_study(ratio: float, steps, dyn: DynamicsSettings, theta_u: float):
    """Relative change of the detector number between consecutive step counts."""
    from .dynamics import dynamics_grid, evolve_symplectic

    d = DetectorParams.from_theta(theta_u, 1.0 / ratio, 1.0)
    grid = dynamics_grid(d, dyn.panels, dyn.order)
    prev, out = None, []
    for n in steps:
        cur = evolve_symplectic(d, grid, n, scheme=dyn.scheme).detector.n
        if prev is not None:
            out.append((n, abs(cur - prev) / max(1.0, abs(cur))))
        prev = cur
    return out


def run_convergence(cfg: SweepConfig) -> ConvergenceReport:
    c = cfg.convergence
    tables = {
        "quadrature_self_norm": quadrature_study(c.r, c.quadrature_panels, c.quadrature_order),
        "discrete_n_g": bin_study(c.r, c.bin_counts, c.bin_order),
    }
    magnus = ()
    if cfg.dynamics is not None:
        from .dynamics import magnus_ladder

        dyn = cfg.dynamics
        tables["symplectic_steps"] = step_study(c.step_ratio, c.step_ladder, dyn, cfg.theta_u)
        magnus = tuple(magnus_ladder(dyn.ratios, cfg.theta_u, 1.0, dyn.panels, dyn.order,
                                     rtol=dyn.rtol, scheme=dyn.scheme))
        tables["magnus_deviation"] = [(m.ratio, m.deviation) for m in magnus]
    return ConvergenceReport(tables, magnus)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_table(header, rows, path) -> Path:
    """Write a CSV with LF line endings and 17 significant digits."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def emit_csv(rows, path) -> Path:
    return write_table(CSV_HEADER, (r.as_row() for r in rows), path)


def emit_convergence_csv(report: ConvergenceReport, path) -> Path:
    return write_table(("study", "level", "error"), report.rows(), path)


def emit_magnus_csv(rows, path) -> Path:
    from .dynamics import MagnusDeviation

    return write_table(MagnusDeviation.FIELDS, (m.as_row() for m in rows), path)


def emit_svg(rows, path) -> Path:
    """Plot the product against ``r`` on a log axis, with the limit as reference.

    Output is byte-stable: fixed hash salt, text kept as text, no date.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "subcycle", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        rs = [row.r for row in rows]
        ax.plot(rs, [row.product for row in rows], "o-", ms=3, lw=1.2, label="product")
        ax.axhline(LIMIT_PRODUCT, color="k", ls="--", lw=0.8)
        ax.text(0.02, LIMIT_PRODUCT, f"1/sqrt(2 pi) = {LIMIT_PRODUCT:.7f}",
                transform=ax.get_yaxis_transform(), va="bottom", fontsize=8)
        ax.set_xscale("log")
        ax.set_xlabel("r = omega0 / sigma")
        ax.set_ylabel("delta_E delta_t")
        fig.tight_layout()
        path = Path(path)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def resolve_out_dir(cfg: SweepConfig, override: str | None = None) -> Path:
    """``--out`` beats the environment variable, which beats the config."""
    out = override or os.environ.get(OUT_DIR_ENV) or cfg.out_dir
    path = Path(out)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path} is not writable")
    return path


def with_format(cfg: SweepConfig, fmt: str | None) -> SweepConfig:
    return cfg if fmt is None else replace(cfg, format=fmt)
