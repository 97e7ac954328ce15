"""Classical light-pulse absorption by a two-mirror Fabry-Perot resonator.

Spectral-filter propagation of complex baseband envelopes, stored-energy
traces, parameter sweeps over pulse shapes and mirror reflectivities, and a
derivative-free pulse-shape optimizer that rediscovers the time-reversed
matched pulse.
"""

from .engine import (
    PropagationResult,
    energy_trace,
    free_decay,
    matched_pulse_spec,
    propagate,
    roundtrip_oracle,
    to_field,
    to_spectrum,
)
from .errors import (
    BudgetExhausted,
    DegenerateCavity,
    FpCavityError,
    GridMismatch,
    GridTooCoarse,
    NoClosedForm,
    NotSingleEnded,
    ParseError,
    RangeError,
    SchemaError,
    WindowOverflow,
    WindowTooShort,
    ZeroIncidentEnergy,
)
from .experiments import (
    PIECEWISE_FAMILY,
    OptimizationReport,
    SweepResult,
    optimize_pulse,
    piecewise_envelope,
    sweep_back_mirror,
    sweep_output_coupling,
    sweep_rectangular_length,
    sweep_time_constant,
    sweep_truncation,
)
from .filters import (
    FilterResponse,
    filter_response,
    highfinesse_reflection,
    highfinesse_reflection_at,
    reflection_at,
    reflection_phase_approx,
    reflection_response,
    transmission_at,
    transmission_response,
)
from .model import (
    INFINITE_WINDOW,
    CavityParams,
    EnergyTrace,
    PulseFamily,
    PulseSpec,
    SampledField,
    Spectrum,
    TimeGrid,
    default_grid,
    validate_cavity,
)
from .pulses import analytic_spectrum, pulse_energy, sample_pulse

__version__ = "0.1.0"
