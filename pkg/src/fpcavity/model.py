"""Domain types and unit conventions.

Conventions used throughout the package:

* Fields are complex baseband envelopes U(t) with the optical carrier factored
  out; the carrier is assumed to sit exactly on a cavity resonance.  Intensity
  is I(t) = |U(t)|^2.
* Detunings are expressed as ordinary frequencies f (Hz).  The round-trip
  phase of a detuning f is theta = 2*pi*f*tau with tau = 1/nu_fsr, and the
  angular detuning paired with the amplitude decay rate Gamma (1/s) is
  delta_a = 2*pi*f.
* Mirrors are lossless: t_i = sqrt(1 - r_i^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .errors import DegenerateCavity, RangeError

__all__ = [
    "CavityParams",
    "TimeGrid",
    "SampledField",
    "Spectrum",
    "PulseFamily",
    "PulseSpec",
    "EnergyTrace",
    "validate_cavity",
    "default_grid",
    "INFINITE_WINDOW",
    "TRUNCATION_AMPLITUDE_FLOOR",
]

#: Sentinel truncation length meaning "as long as the grid allows".
INFINITE_WINDOW = math.inf

#: Relative amplitude below which the infinite-window sentinel truncates.
TRUNCATION_AMPLITUDE_FLOOR = 1e-9


@dataclass(frozen=True)
class CavityParams:
    """Two-mirror resonator: free spectral range and amplitude reflectivities."""

    nu_fsr: float
    r1: float
    r2: float = 1.0
    area: float = 1.0

    def __post_init__(self):
        problems = []
        if not (0.0 < self.r1 <= 1.0):
            problems.append(f"r1={self.r1} outside (0, 1]")
        if not (0.0 < self.r2 <= 1.0):
            problems.append(f"r2={self.r2} outside (0, 1]")
        if not self.nu_fsr > 0.0:
            problems.append(f"nu_fsr={self.nu_fsr} must be > 0")
        if not self.area > 0.0:
            problems.append(f"area={self.area} must be > 0")
        if problems:
            raise RangeError("; ".join(problems))

    @property
    def t1(self) -> float:
        return math.sqrt(1.0 - self.r1 * self.r1)

    @property
    def t2(self) -> float:
        return math.sqrt(1.0 - self.r2 * self.r2)

    @property
    def tau(self) -> float:
        """Round-trip time (s)."""
        return 1.0 / self.nu_fsr

    @property
    def gamma(self) -> float:
        """Internal field amplitude decay rate (1/s); zero iff both mirrors are perfect."""
        return -self.nu_fsr * math.log(self.r1 * self.r2)


def validate_cavity(params: CavityParams) -> CavityParams:
    """Return the validated parameter set (construction already enforces ranges)."""
    return CavityParams(params.nu_fsr, params.r1, params.r2, params.area)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling lattice shared by fields, spectra and traces."""

    t_start: float
    dt: float
    n: int

    def __post_init__(self):
        if not self.dt > 0.0:
            raise RangeError(f"dt={self.dt} must be > 0")
        if self.n < 2:
            raise RangeError(f"n={self.n} must be >= 2")

    @property
    def duration(self) -> float:
        return self.n * self.dt

    @property
    def t_end(self) -> float:
        return self.t_start + (self.n - 1) * self.dt

    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n)

    def frequencies(self) -> np.ndarray:
        """Signed detuning bins (Hz) in FFT order."""
        return np.fft.fftfreq(self.n, self.dt)

    def frequencies_sorted(self) -> np.ndarray:
        """Signed detuning bins (Hz) in ascending order."""
        return np.fft.fftshift(self.frequencies())

    def index_at(self, t: float) -> int:
        """Index of the sample closest to time t."""
        return int(round((t - self.t_start) / self.dt))


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex baseband envelope on a TimeGrid."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if values.shape != (self.grid.n,):
            raise RangeError(
                f"field has {values.shape} values for a grid of {self.grid.n} samples"
            )
        if not np.all(np.isfinite(values.view(np.float64))):
            raise RangeError("field contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Complex amplitudes per frequency bin, ordered by signed detuning."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if values.shape != (self.grid.n,):
            raise RangeError(
                f"spectrum has {values.shape} values for a grid of {self.grid.n} bins"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies_sorted()


class PulseFamily:
    """Tags for the supported incident-pulse families."""

    TRUNCATED_RISING_EXPONENTIAL = "truncated_rising_exponential"
    RECTANGULAR = "rectangular"
    RISING_EXPONENTIAL_RATE = "rising_exponential_rate"

    ALL = (TRUNCATED_RISING_EXPONENTIAL, RECTANGULAR, RISING_EXPONENTIAL_RATE)


@dataclass(frozen=True)
class PulseSpec:
    """Incident pulse description.

    ``rate_or_tau`` is the growth rate Gamma (1/s) for the truncated rising
    exponential, the length T (s) for the rectangular family, and the time
    constant tau_p (s) for the rising exponential parameterized by rate.
    ``truncation`` (s) applies to the exponential families; the
    INFINITE_WINDOW sentinel truncates where the amplitude falls below
    TRUNCATION_AMPLITUDE_FLOOR times the peak.
    """

    family: str
    p0: float
    rate_or_tau: float
    truncation: float = INFINITE_WINDOW

    def __post_init__(self):
        problems = []
        if self.family not in PulseFamily.ALL:
            problems.append(f"unknown pulse family {self.family!r}")
        if not self.p0 > 0.0:
            problems.append(f"p0={self.p0} must be > 0")
        if not self.rate_or_tau > 0.0:
            problems.append(f"rate_or_tau={self.rate_or_tau} must be > 0")
        if not self.truncation > 0.0:
            problems.append(f"truncation={self.truncation} must be > 0")
        if problems:
            raise RangeError("; ".join(problems))

    def support_length(self) -> float:
        """Effective support length (s) after applying the sentinel truncation."""
        if self.family == PulseFamily.RECTANGULAR:
            return self.rate_or_tau
        if self.family == PulseFamily.TRUNCATED_RISING_EXPONENTIAL:
            rate = self.rate_or_tau
        else:
            rate = 1.0 / self.rate_or_tau
        sentinel = -math.log(TRUNCATION_AMPLITUDE_FLOOR) / rate
        return min(self.truncation, sentinel)


@dataclass(frozen=True, eq=False)
class EnergyTrace:
    """Stored-energy fraction epsilon(t) with its maximum."""

    grid: TimeGrid
    epsilon: np.ndarray
    epsilon_max: float
    t_max_index: int

    def __post_init__(self):
        eps = np.ascontiguousarray(self.epsilon, dtype=np.float64)
        if eps.shape != (self.grid.n,):
            raise RangeError("epsilon length does not match grid")
        if eps.min() < -1e-9 or eps.max() > 1.0 + 1e-6:
            raise RangeError(
                f"epsilon outside [0, 1+1e-6]: min={eps.min()}, max={eps.max()}"
            )
        if not np.isclose(self.epsilon_max, eps[self.t_max_index], rtol=0, atol=1e-15):
            raise RangeError("epsilon_max inconsistent with t_max_index")
        eps.flags.writeable = False
        object.__setattr__(self, "epsilon", eps)


def default_grid(
    params: CavityParams,
    window_lifetimes: float,
    samples_per_fsr: float = 5.0,
    pre_fraction: float = 0.6,
) -> TimeGrid:
    """Build the standard simulation grid for a cavity.

    The step is 1/(samples_per_fsr * nu_fsr) exactly; the total duration is at
    least ``window_lifetimes`` cavity lifetimes, rounded up to an efficient
    transform size.  ``pre_fraction`` of the window is placed before t = 0
    (the pulse peak), with t = 0 aligned to a sample.
    """
    gamma = params.gamma
    if gamma == 0.0:
        raise DegenerateCavity("r1 = r2 = 1 gives Gamma = 0; no natural time scale")
    if not window_lifetimes > 0.0:
        raise RangeError(f"window_lifetimes={window_lifetimes} must be > 0")
    if not 0.0 < pre_fraction < 1.0:
        raise RangeError(f"pre_fraction={pre_fraction} must be in (0, 1)")
    dt = 1.0 / (samples_per_fsr * params.nu_fsr)
    n_min = math.ceil(window_lifetimes / (gamma * dt))
    n = scipy.fft.next_fast_len(max(n_min, 2))
    t_start = -round(pre_fraction * n) * dt
    return TimeGrid(t_start=t_start, dt=dt, n=n)
