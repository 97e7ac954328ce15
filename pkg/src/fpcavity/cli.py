"""Command-line front end.

Subcommands: ``simulate``, ``sweep <name>``, ``optimize``, ``figure <N>``.
Global flags: ``--config PATH``, ``--out DIR``, ``--threads N``,
``--allow-coarse-grid``, ``--no-plot``.

Exit codes: 0 success, 1 runtime/engine error, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .config import RunConfig, parse_config
from .engine import energy_trace, propagate
from .errors import FpCavityError, ParseError, SchemaError
from .model import PulseFamily, default_grid
from .pulses import sample_pulse
from .report import (
    format_float,
    write_meta,
    write_optimization_csv,
    write_sweep_csv,
    write_timeseries_csv,
)

SWEEP_NAMES = (
    "rectangular_length",
    "output_coupling",
    "truncation",
    "time_constant",
    "back_mirror",
)

FIGURE_SWEEPS = {4: "rectangular_length", 5: "output_coupling", 6: "truncation",
                 7: "time_constant", 8: "back_mirror"}

_FIG8_R1 = (0.97, 0.98, 0.99, 0.999)
_FIG8_R2 = (1.0, 0.99995, 0.9999, 0.9995, 0.999, 0.995, 0.99)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpcav",
        description="Pulse absorption in a two-mirror Fabry-Perot resonator",
    )
    parser.add_argument("--config", metavar="PATH", help="JSON run configuration")
    parser.add_argument("--out", metavar="DIR", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=1, metavar="N",
                        help="worker threads for sweep points")
    parser.add_argument("--allow-coarse-grid", action="store_true",
                        help="skip the 5*nu_fsr / 500-lifetime grid checks")
    parser.add_argument("--no-plot", action="store_true",
                        help="skip figure rendering")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", help="single propagation, time-series CSV")
    p_sweep = sub.add_parser("sweep", help="parameter sweep, efficiency CSV")
    p_sweep.add_argument("name", choices=SWEEP_NAMES)
    sub.add_parser("optimize", help="pulse-shape optimization")
    p_fig = sub.add_parser("figure", help="run a preset sweep by figure number")
    p_fig.add_argument("number", type=int)
    return parser


def _load_config(args) -> RunConfig:
    if args.config is None:
        return parse_config({})
    return parse_config(Path(args.config))


def _should_plot(args, config: RunConfig) -> bool:
    return config.output.plots and not args.no_plot


def _run_simulate(args, config: RunConfig, out: Path) -> int:
    params = config.cavity_params()
    grid = default_grid(
        params,
        config.grid.window_lifetimes,
        samples_per_fsr=config.grid.sampling_per_fsr,
        pre_fraction=config.grid.t_start_fraction,
    )
    spec = config.pulse_spec(params.gamma)
    incident = sample_pulse(spec, grid)
    result = propagate(params, incident, allow_coarse_grid=args.allow_coarse_grid)
    trace = energy_trace(result, params.area)
    t_max = grid.times()[trace.t_max_index]
    write_timeseries_csv(result, trace, out / "timeseries.csv", config.output.max_rows)
    write_meta(
        out / "simulate.meta.json",
        config.to_dict(),
        {"summary": {"epsilon_max": trace.epsilon_max, "t_max_s": t_max}},
    )
    if _should_plot(args, config):
        from .plots import plot_timeseries

        plot_timeseries(result, trace, out / "timeseries.png")
    print(f"epsilon_max={format_float(trace.epsilon_max)} t_max_s={format_float(t_max)}")
    return 0


def _sweep_by_name(name: str, args, config: RunConfig):
    params = config.cavity_params()
    gamma = params.gamma
    lifetime = 1.0 / gamma
    workers = max(1, args.threads)
    points = config.sweep.points
    if name == "rectangular_length":
        T = np.array(config.sweep.t_values_lifetimes) * lifetime
        if T.size == 0:
            T = lifetime * np.geomspace(0.1, 30.0, points)
        return experiments.sweep_rectangular_length(params, T, workers=workers)
    if name == "output_coupling":
        x = np.array(config.sweep.loss_fractions)
        if x.size == 0:
            x = np.linspace(0.0, 0.5, points)
        return experiments.sweep_output_coupling(
            params.nu_fsr, x, r1_ref=params.r1, workers=workers
        )
    if name == "truncation":
        T = np.array(config.sweep.t_values_lifetimes) * lifetime
        if T.size == 0:
            T = lifetime * np.linspace(0.2, 10.0, points)
        return experiments.sweep_truncation(params, T, workers=workers)
    if name == "time_constant":
        tau = np.array(config.sweep.tau_p_values_lifetimes) * lifetime
        if tau.size == 0:
            n = min(points, 25)
            tau = lifetime * 0.25 * 16.0 ** (np.arange(n) / (n - 1))
        return experiments.sweep_time_constant(params, tau, workers=workers)
    if name == "back_mirror":
        r1 = np.array(config.sweep.r1_values) if config.sweep.r1_values else np.array(_FIG8_R1)
        r2 = np.array(config.sweep.r2_values) if config.sweep.r2_values else np.array(_FIG8_R2)
        return experiments.sweep_back_mirror(r1, r2, params.nu_fsr, workers=workers)
    raise ValueError(name)


def _emit_sweep(sweep, args, config: RunConfig, out: Path, stem: str) -> None:
    write_sweep_csv(sweep, out / f"{stem}.csv")
    write_meta(
        out / f"{stem}.meta.json",
        config.to_dict(),
        {"sweep": {"name": sweep.sweep_name, "x_name": sweep.x_name,
                   "series_metadata": sweep.metadata}},
    )
    if _should_plot(args, config):
        from .plots import plot_sweep

        plot_sweep(sweep, out / f"{stem}.png")


def _run_sweep(args, config: RunConfig, out: Path) -> int:
    sweep = _sweep_by_name(args.name, args, config)
    _emit_sweep(sweep, args, config, out, args.name)
    print(f"sweep {args.name}: {sweep.x_values.size} points")
    return 0


def _run_figure(args, config: RunConfig, out: Path) -> int:
    name = FIGURE_SWEEPS.get(args.number)
    if name is None:
        print(f"unknown figure {args.number}", file=sys.stderr)
        return 2
    sweep = _sweep_by_name(name, args, config)
    _emit_sweep(sweep, args, config, out, f"fig{args.number}")
    print(f"figure {args.number} ({name}): {sweep.x_values.size} points")
    return 0


def _run_optimize(args, config: RunConfig, out: Path) -> int:
    params = config.cavity_params()
    lifetime = 1.0 / params.gamma
    opt = config.optimize
    if opt.family == PulseFamily.RISING_EXPONENTIAL_RATE:
        bounds = {
            "tau_p": tuple(b * lifetime for b in opt.tau_p_bounds_lifetimes),
            "truncation": tuple(b * lifetime for b in opt.truncation_bounds_lifetimes),
        }
    else:
        bounds = {"amplitude": opt.amplitude_bounds}
    report = experiments.optimize_pulse(
        params,
        opt.family,
        bounds,
        segments=opt.segments,
        support_lifetimes=opt.support_lifetimes,
        max_evaluations=opt.max_evaluations,
        tolerance=opt.tolerance,
    )
    write_optimization_csv(report, out / "optimize_trace.csv")
    write_meta(
        out / "optimize.meta.json",
        config.to_dict(),
        {"optimization": {
            "family": report.family,
            "best_params": report.best_params,
            "best_eps_max": report.best_eps_max,
            "evaluations": report.evaluations,
        }},
    )
    print(f"best eps_max={format_float(report.best_eps_max)} "
          f"after {report.evaluations} evaluations")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _load_config(args)
    except (ParseError, SchemaError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            return _run_simulate(args, config, out)
        if args.command == "sweep":
            return _run_sweep(args, config, out)
        if args.command == "figure":
            return _run_figure(args, config, out)
        if args.command == "optimize":
            return _run_optimize(args, config, out)
        print(f"unknown command {args.command}", file=sys.stderr)
        return 2
    except FpCavityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
