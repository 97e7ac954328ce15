import math

import numpy as np
import pytest
import scipy.fft

from fpcavity import CavityParams, TimeGrid


def rel_rms(actual, expected):
    """Relative r.m.s. difference against a reference signal."""
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    return float(
        np.sqrt(np.mean(np.abs(actual - expected) ** 2))
        / np.sqrt(np.mean(np.abs(expected) ** 2))
    )


def grid_for(params: CavityParams, window_lifetimes: float, samples_per_fsr: float = 5.0,
             pre_fraction: float = 0.6) -> TimeGrid:
    """Test grid sized in cavity lifetimes, t = 0 on a sample."""
    dt = 1.0 / (samples_per_fsr * params.nu_fsr)
    n = scipy.fft.next_fast_len(math.ceil(window_lifetimes / (params.gamma * dt)))
    return TimeGrid(t_start=-round(pre_fraction * n) * dt, dt=dt, n=n)


@pytest.fixture
def reference_cavity():
    """The reference single-ended high-finesse resonator."""
    return CavityParams(nu_fsr=1e10, r1=0.9999, r2=1.0)


@pytest.fixture
def fast_cavity():
    """Lower finesse keeps unit-test grids small."""
    return CavityParams(nu_fsr=1e10, r1=0.999, r2=1.0)
