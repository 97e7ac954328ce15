"""Matplotlib renderings of simulation traces and sweep curves.

Figures are written to files next to the delimited output; nothing here is
interactive.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .engine import PropagationResult
from .experiments import SweepResult
from .model import EnergyTrace

__all__ = ["plot_timeseries", "plot_sweep"]


def plot_timeseries(
    result: PropagationResult,
    trace: EnergyTrace,
    path: Path,
    max_points: int = 20000,
) -> None:
    grid = result.incident.grid
    stride = max(1, -(-grid.n // max_points))
    t = grid.times()[::stride]
    fig, (ax_i, ax_e) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    ax_i.plot(t, np.abs(result.incident.values[::stride]) ** 2, label="incident")
    ax_i.plot(t, np.abs(result.reflected.values[::stride]) ** 2, label="reflected")
    ax_i.plot(t, np.abs(result.transmitted.values[::stride]) ** 2, label="transmitted")
    ax_i.set_ylabel("intensity $|U|^2$")
    ax_i.legend(loc="best", fontsize="small")
    ax_e.plot(t, trace.epsilon[::stride], color="k")
    ax_e.set_ylabel(r"stored fraction $\epsilon(t)$")
    ax_e.set_xlabel("t (s)")
    ax_e.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep(sweep: SweepResult, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    x = sweep.x_values
    logx = x.min() > 0 and x.max() / x.min() > 20.0
    for name, values in sweep.series.items():
        if logx:
            ax.semilogx(x, values, marker=".", label=name)
        else:
            ax.plot(x, values, marker=".", label=name)
    ax.set_xlabel(sweep.x_name)
    ax.set_ylabel(r"$\epsilon_{max}$")
    ax.set_title(sweep.sweep_name)
    if len(sweep.series) > 1:
        ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
