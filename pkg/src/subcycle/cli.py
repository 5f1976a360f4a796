"""Command-line entry point.

Exit codes: 0 success, 1 configuration or I/O error, 2 numerical convergence
failure (including failed ``validate`` checks).
"""
from __future__ import annotations

import argparse
import math
import sys

from .errors import ConfigError, ConvergenceError

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 1, 2


def _load(args):
    from .experiments import SweepConfig, with_format

    cfg = SweepConfig.from_json(args.config) if args.config else SweepConfig()
    return with_format(cfg, getattr(args, "format", None))


def _cmd_sweep(args) -> int:
    from .experiments import emit_csv, emit_svg, resolve_out_dir, run_sweep

    cfg = _load(args)
    out = resolve_out_dir(cfg, args.out)
    rows = run_sweep(cfg)
    if cfg.format in ("csv", "both"):
        print(emit_csv(rows, out / "sweep.csv"))
    if cfg.format in ("svg", "both"):
        print(emit_svg(rows, out / "sweep.svg"))
    return EXIT_OK


def _cmd_limit(args) -> int:
    # kept light: no plotting or dynamics imports
    from .detector import LIMIT_PRODUCT, subcycle_limit
    from .experiments import SweepConfig

    cfg = SweepConfig.from_json(args.config) if args.config else SweepConfig()
    est = subcycle_limit(cfg.limit.ladder, tol=cfg.limit.tol, hbar=cfg.hbar)
    print(f"limit {est.value:.12f}")
    print(f"residual {est.residual:.3e}")
    print(f"target {cfg.hbar * LIMIT_PRODUCT:.12f}")
    return EXIT_OK


def _cmd_dynamics(args) -> int:
    from .dynamics import magnus_ladder
    from .dynamics.symplectic import strictly_decreasing
    from .experiments import emit_magnus_csv, resolve_out_dir

    cfg = _load(args)
    if cfg.dynamics is None:
        raise ConfigError("config has no dynamics section")
    dyn = cfg.dynamics
    out = resolve_out_dir(cfg, args.out)
    rows = magnus_ladder(dyn.ratios, cfg.theta_u, 1.0, dyn.panels, dyn.order,
                         rtol=dyn.rtol, scheme=dyn.scheme)
    print(f"{'sigma_u/omega_u':>16} {'n_exact':>14} {'n_predicted':>12} {'deviation':>12} {'steps':>7}")
    for m in rows:
        print(f"{m.ratio:16.6g} {m.n_exact:14.6g} {m.n_predicted:12.6g} {m.deviation:12.4g} {m.steps:7d}")
    if not strictly_decreasing(m.deviation for m in rows):
        print("note: deviation does not decrease along the ladder")
    print(emit_magnus_csv(rows, out / "magnus.csv"))
    return EXIT_OK


def _cmd_converge(args) -> int:
    from .experiments import emit_convergence_csv, emit_magnus_csv, resolve_out_dir, run_convergence

    cfg = _load(args)
    out = resolve_out_dir(cfg, args.out)
    report = run_convergence(cfg)
    for name, level, err in report.rows():
        print(f"{name:22s} {level:>10g} {err:.3e}")
    print(emit_convergence_csv(report, out / "convergence.csv"))
    if report.magnus:
        print(emit_magnus_csv(report.magnus, out / "magnus.csv"))
    return EXIT_OK


def _validation_checks(cfg):
    import numpy as np

    from .detector import LIMIT_PRODUCT, product_terms, subcycle_limit
    from .dynamics import discretize_mode, fock_brute_force, wick_moments_discrete
    from .experiments import run_sweep
    from .gaussian_mode import GaussianModeParams, default_grid, split_closed_form, split_quadrature
    from .spectral import build_grid

    def limit():
        return abs(subcycle_limit().value - LIMIT_PRODUCT) <= 1e-6

    def quadrature():
        g = cfg.grid
        for r in (0.01, 0.1, 1.0, 5.0, 10.0):
            p = GaussianModeParams(omega0=r)
            q = split_quadrature(p, default_grid(p, g.panels, g.order, g.cutoff_sigmas))
            c = split_closed_form(p)
            if abs(q.sinh2 - c.sinh2) > 1e-8 or abs(q.cross - c.cross) > 1e-8:
                return False
        return True

    def wick_vs_fock():
        p = GaussianModeParams(omega0=1.0)
        mode = discretize_mode(p, build_grid(13.0, 1, 2), tol=1.0)
        scale = 1.0 / np.sqrt(mode.commutator)
        from .dynamics import DiscretizedMode

        mode = DiscretizedMode(mode.alpha * scale, mode.beta * scale)
        a, b = fock_brute_force(mode, cutoff=8), wick_moments_discrete(mode)
        return max(abs(a.n - b.n), abs(a.m - b.m), abs(a.n2 - b.n2)) <= 1e-10

    def product_identity():
        for row in run_sweep(cfg):
            if "underflow" in row.flags or cfg.theta_u != math.pi / 2:
                continue
            if cfg.dt_convention != "stddev":
                continue
            want = cfg.hbar**2 * sum(product_terms(GaussianModeParams(omega0=row.r)))
            if abs(row.product**2 - want) > 1e-12 * max(1.0, want):
                return False
        return True

    return {"limit": limit, "closed_form_vs_quadrature": quadrature,
            "wick_vs_fock": wick_vs_fock, "product_identity": product_identity}


def _cmd_validate(args) -> int:
    cfg = _load(args)
    failed = []
    for name, check in _validation_checks(cfg).items():
        try:
            ok = check()
        except ConvergenceError:
            ok = False
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failed.append(name)
    return EXIT_CONVERGENCE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subcycle",
                                     description="Subcycle vacuum modes and the time-energy product.")
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "sweep": (_cmd_sweep, "product and moments over a list of r values"),
        "limit": (_cmd_limit, "extrapolate the product to r -> 0"),
        "dynamics": (_cmd_dynamics, "exact evolution against the beamsplitter prediction"),
        "converge": (_cmd_converge, "refinement studies"),
        "validate": (_cmd_validate, "quick cross-checks of the analytic results"),
    }
    for name, (fn, help_text) in handlers.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory (overrides SUBCYCLE_OUT_DIR)")
        p.add_argument("--format", choices=("csv", "svg", "both"), help="artifact format")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
