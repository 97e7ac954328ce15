"""Deterministic CSV and metadata emission.

Floats are written with 17 significant digits in scientific notation so that
identical configurations produce byte-identical files; CSV rows follow
RFC 4180 line conventions (CRLF, header row, '.' decimal separator).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .engine import PropagationResult
from .experiments import OptimizationReport, SweepResult
from .model import EnergyTrace

__all__ = [
    "format_float",
    "write_sweep_csv",
    "write_timeseries_csv",
    "write_optimization_csv",
    "write_meta",
    "TOOL_VERSION",
]

TOOL_VERSION = "fpcavity 0.1.0"


def format_float(x: float) -> str:
    return f"{x:.16e}"


def _open_csv(path: Path):
    return open(path, "w", newline="")


def write_sweep_csv(sweep: SweepResult, path: Path) -> None:
    with _open_csv(path) as handle:
        writer = csv.writer(handle)
        writer.writerow([sweep.x_name, *sweep.series.keys()])
        columns = [sweep.x_values, *sweep.series.values()]
        for row in zip(*columns):
            writer.writerow([format_float(v) for v in row])


def write_timeseries_csv(
    result: PropagationResult,
    trace: EnergyTrace,
    path: Path,
    max_rows: int | None = None,
) -> None:
    """Time series of intensities and stored-energy fraction.

    ``max_rows`` decimates the output with a uniform stride; the summary
    quantities are computed on the full-resolution trace regardless.
    """
    grid = result.incident.grid
    stride = 1
    if max_rows is not None and grid.n > max_rows:
        stride = -(-grid.n // max_rows)
    t = grid.times()[::stride]
    i_in = np.abs(result.incident.values[::stride]) ** 2
    i_refl = np.abs(result.reflected.values[::stride]) ** 2
    i_trans = np.abs(result.transmitted.values[::stride]) ** 2
    eps = trace.epsilon[::stride]
    with _open_csv(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(["t_s", "I_in", "I_refl", "I_trans", "epsilon"])
        for row in zip(t, i_in, i_refl, i_trans, eps):
            writer.writerow([format_float(v) for v in row])


def write_optimization_csv(report: OptimizationReport, path: Path) -> None:
    with _open_csv(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(["evaluations", "best_eps_max"])
        for evals, best in report.trace:
            writer.writerow([str(evals), format_float(best)])


def write_meta(path: Path, resolved_config: dict, extra: dict | None = None) -> None:
    payload = {"tool": TOOL_VERSION, "config": resolved_config}
    if extra:
        payload.update(extra)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
