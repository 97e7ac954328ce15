"""Exact and approximate complex transfer functions of the etalon.

The reflection and transmission coefficients are evaluated on arbitrary
detuning arrays (Hz).  Grid-level responses are cached per (params, grid)
because sweeps reuse grids heavily; the cache is a plain ``lru_cache`` and is
safe for concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateCavity, NotSingleEnded
from .model import CavityParams, TimeGrid

__all__ = [
    "FilterResponse",
    "reflection_at",
    "transmission_at",
    "highfinesse_reflection_at",
    "reflection_response",
    "transmission_response",
    "highfinesse_reflection",
    "reflection_phase_approx",
    "filter_response",
]


@dataclass(frozen=True, eq=False)
class FilterResponse:
    """Reflection and transmission coefficients per frequency bin (ascending detuning)."""

    grid: TimeGrid
    reflection: np.ndarray
    transmission: np.ndarray


def reflection_at(params: CavityParams, f: np.ndarray) -> np.ndarray:
    """Reflection coefficient at detunings f (Hz):
    (-r1 + r2 e^{-i theta}) / (1 - r1 r2 e^{-i theta}) with theta = 2 pi f / nu_fsr.
    """
    # Reduce the round-trip phase modulo one free spectral range so that the
    # periodicity C_R(f + nu_fsr) = C_R(f) holds bitwise on aligned grids.
    x = np.mod(np.asarray(f, dtype=np.float64) / params.nu_fsr, 1.0)
    z = np.exp(-2j * np.pi * x)
    return (-params.r1 + params.r2 * z) / (1.0 - params.r1 * params.r2 * z)


def transmission_at(params: CavityParams, f: np.ndarray) -> np.ndarray:
    """Transmission coefficient at detunings f (Hz):
    t1 t2 e^{-i theta/2} / (1 - r1 r2 e^{-i theta}).
    """
    theta = 2.0 * np.pi * np.asarray(f, dtype=np.float64) / params.nu_fsr
    half = np.exp(-0.5j * theta)
    return params.t1 * params.t2 * half / (1.0 - params.r1 * params.r2 * half * half)


def highfinesse_reflection_at(params: CavityParams, f: np.ndarray) -> np.ndarray:
    """Single-ended high-finesse reflection (Gamma - i 2 pi f)/(Gamma + i 2 pi f)."""
    if params.r2 < 1.0:
        raise NotSingleEnded(f"r2={params.r2} < 1")
    gamma = params.gamma
    if gamma == 0.0:
        raise DegenerateCavity("Gamma = 0 leaves the high-finesse filter undefined")
    delta = 2.0 * np.pi * np.asarray(f, dtype=np.float64)
    return (gamma - 1j * delta) / (gamma + 1j * delta)


def reflection_response(params: CavityParams, grid: TimeGrid) -> np.ndarray:
    """Reflection coefficients on the grid's bins, ordered by signed detuning."""
    return filter_response(params, grid).reflection


def transmission_response(params: CavityParams, grid: TimeGrid) -> np.ndarray:
    """Transmission coefficients on the grid's bins, ordered by signed detuning."""
    return filter_response(params, grid).transmission


def highfinesse_reflection(params: CavityParams, grid: TimeGrid) -> np.ndarray:
    """High-finesse reflection coefficients on the grid's bins (ascending detuning)."""
    return highfinesse_reflection_at(params, grid.frequencies_sorted())


def reflection_phase_approx(params: CavityParams, grid: TimeGrid) -> np.ndarray:
    """Approximate single-ended reflection phase, unwrapped over the grid's bins.

    The arctangent expression is evaluated with the detuning read in angular
    form (delta_a / nu_fsr), the convention under which it reduces to the
    high-finesse all-pass phase, and unwrapped to be continuous across its
    branch points.  The pi-period unwrap anchors the curve so that the
    returned phase is 0 on resonance; against arg C_R it therefore agrees
    modulo 2 pi rather than pointwise (windings accumulate once per free
    spectral range).
    """
    if params.r2 < 1.0:
        raise NotSingleEnded(f"r2={params.r2} < 1")
    x = 2.0 * np.pi * grid.frequencies_sorted() / params.nu_fsr
    rho = 1.0 - params.r1
    raw = np.arctan(-2.0 * rho * x / (rho * rho - x * x)) + np.pi
    return np.unwrap(raw, period=np.pi)


@lru_cache(maxsize=64)
def filter_response(params: CavityParams, grid: TimeGrid) -> FilterResponse:
    """Cached exact reflection/transmission response for a (params, grid) pair."""
    f = grid.frequencies_sorted()
    refl = reflection_at(params, f)
    trans = transmission_at(params, f)
    refl.flags.writeable = False
    trans.flags.writeable = False
    return FilterResponse(grid=grid, reflection=refl, transmission=trans)
