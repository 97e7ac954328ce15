"""Run configuration: JSON ingestion, strict schema validation, defaults.

The schema is strict: unknown keys are rejected, and every violation found is
reported in one SchemaError rather than only the first.  Defaults reproduce
the reference numerical settings: nu_fsr = 10 GHz, r1 = 0.9999, r2 = 1,
sampling at 5 nu_fsr and a window of 500 cavity lifetimes.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ParseError, SchemaError
from .model import CavityParams, PulseFamily, PulseSpec

__all__ = [
    "CavityConfig",
    "PulseConfig",
    "GridConfig",
    "OutputConfig",
    "SweepConfig",
    "OptimizeConfig",
    "RunConfig",
    "parse_config",
]


@dataclass(frozen=True)
class CavityConfig:
    nu_fsr_hz: float = 1e10
    r1: float = 0.9999
    r2: float = 1.0
    area_m2: float = 1.0


@dataclass(frozen=True)
class PulseConfig:
    family: str = PulseFamily.TRUNCATED_RISING_EXPONENTIAL
    p0: float = 1.0
    #: Growth rate in Hz; null means "match the cavity decay rate".
    gamma_hz: float | None = None
    #: Time constant in seconds; alternative to gamma_hz (at most one).
    tau_p_s: float | None = None
    #: Truncation length; lifetimes take precedence over seconds if both unset -> infinite.
    truncation_lifetimes: float | None = None
    truncation_s: float | None = None
    #: Rectangular pulse length.
    length_lifetimes: float | None = None
    length_s: float | None = None


@dataclass(frozen=True)
class GridConfig:
    sampling_per_fsr: float = 5.0
    window_lifetimes: float = 500.0
    t_start_fraction: float = 0.6


@dataclass(frozen=True)
class OutputConfig:
    #: Decimate the simulate time-series CSV to at most this many rows
    #: (summary values are always computed at full resolution); null = all rows.
    max_rows: int | None = 100000
    plots: bool = True


@dataclass(frozen=True)
class SweepConfig:
    points: int = 50
    #: Per-sweep parameter grids; values in cavity lifetimes where noted.
    t_values_lifetimes: tuple = ()
    loss_fractions: tuple = ()
    tau_p_values_lifetimes: tuple = ()
    r1_values: tuple = ()
    r2_values: tuple = ()


@dataclass(frozen=True)
class OptimizeConfig:
    family: str = PulseFamily.RISING_EXPONENTIAL_RATE
    segments: int = 16
    support_lifetimes: float = 4.0
    tau_p_bounds_lifetimes: tuple = (0.25, 4.0)
    truncation_bounds_lifetimes: tuple = (1.0, 12.0)
    amplitude_bounds: tuple = (0.0, 2.0)
    max_evaluations: int = 5000
    tolerance: float = 1e-6


@dataclass(frozen=True)
class RunConfig:
    cavity: CavityConfig = field(default_factory=CavityConfig)
    pulse: PulseConfig = field(default_factory=PulseConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    optimize: OptimizeConfig = field(default_factory=OptimizeConfig)

    def to_dict(self) -> dict:
        d = asdict(self)
        for section in ("sweep", "optimize"):
            d[section] = {
                k: list(v) if isinstance(v, tuple) else v
                for k, v in d[section].items()
            }
        return d

    def cavity_params(self) -> CavityParams:
        c = self.cavity
        return CavityParams(nu_fsr=c.nu_fsr_hz, r1=c.r1, r2=c.r2, area=c.area_m2)

    def pulse_spec(self, gamma: float) -> PulseSpec:
        """Resolve the pulse section against the cavity decay rate."""
        p = self.pulse
        truncation = math.inf
        if p.truncation_s is not None:
            truncation = p.truncation_s
        elif p.truncation_lifetimes is not None:
            truncation = p.truncation_lifetimes / gamma
        if p.family == PulseFamily.RECTANGULAR:
            length = p.length_s if p.length_s is not None else p.length_lifetimes / gamma
            return PulseSpec(family=p.family, p0=p.p0, rate_or_tau=length)
        if p.family == PulseFamily.RISING_EXPONENTIAL_RATE:
            tau_p = p.tau_p_s if p.tau_p_s is not None else 1.0 / (p.gamma_hz or gamma)
            return PulseSpec(
                family=p.family, p0=p.p0, rate_or_tau=tau_p, truncation=truncation
            )
        rate = gamma
        if p.gamma_hz is not None:
            rate = p.gamma_hz
        elif p.tau_p_s is not None:
            rate = 1.0 / p.tau_p_s
        return PulseSpec(family=p.family, p0=p.p0, rate_or_tau=rate, truncation=truncation)


_NUMBER = (int, float)


def _check_number(out, section, key, value, lo=None, hi=None, lo_open=False, optional=False):
    if value is None:
        if optional:
            return None
        out.append(f"{section}.{key}: value required")
        return None
    if isinstance(value, bool) or not isinstance(value, _NUMBER):
        out.append(f"{section}.{key}: expected a number, got {value!r}")
        return None
    value = float(value)
    if lo is not None and (value <= lo if lo_open else value < lo):
        bound = f"> {lo}" if lo_open else f">= {lo}"
        out.append(f"{section}.{key}: {value} must be {bound}")
        return None
    if hi is not None and value > hi:
        out.append(f"{section}.{key}: {value} must be <= {hi}")
        return None
    return value


def _section(out, data, name, allowed):
    raw = data.get(name, {})
    if not isinstance(raw, dict):
        out.append(f"{name}: expected an object")
        return {}
    for key in raw:
        if key not in allowed:
            out.append(f"{name}.{key}: unknown key")
    return raw


def parse_config(source) -> RunConfig:
    """Parse JSON text, a file path, or a dict into a validated RunConfig."""
    if isinstance(source, dict):
        data = source
    else:
        text = source
        if isinstance(source, Path) or (
            isinstance(source, str) and not source.lstrip().startswith("{")
        ):
            try:
                text = Path(source).read_text()
            except OSError as exc:
                raise ParseError(f"cannot read config file {source}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    if not isinstance(data, dict):
        raise ParseError("config root must be a JSON object")

    out: list[str] = []
    for key in data:
        if key not in ("cavity", "pulse", "grid", "output", "sweep", "optimize"):
            out.append(f"{key}: unknown section")

    cav = _section(out, data, "cavity", {"nu_fsr_hz", "r1", "r2", "area_m2"})
    defaults = CavityConfig()
    cavity = CavityConfig(
        nu_fsr_hz=_check_number(out, "cavity", "nu_fsr_hz", cav.get("nu_fsr_hz", defaults.nu_fsr_hz), lo=0, lo_open=True) or defaults.nu_fsr_hz,
        r1=_check_number(out, "cavity", "r1", cav.get("r1", defaults.r1), lo=0, hi=1, lo_open=True) or defaults.r1,
        r2=_check_number(out, "cavity", "r2", cav.get("r2", defaults.r2), lo=0, hi=1, lo_open=True) or defaults.r2,
        area_m2=_check_number(out, "cavity", "area_m2", cav.get("area_m2", defaults.area_m2), lo=0, lo_open=True) or defaults.area_m2,
    )

    pul = _section(
        out,
        data,
        "pulse",
        {
            "family",
            "p0",
            "gamma_hz",
            "tau_p_s",
            "truncation_lifetimes",
            "truncation_s",
            "length_lifetimes",
            "length_s",
        },
    )
    family = pul.get("family", PulseFamily.TRUNCATED_RISING_EXPONENTIAL)
    if family not in PulseFamily.ALL:
        out.append(f"pulse.family: {family!r} not one of {list(PulseFamily.ALL)}")
        family = PulseFamily.TRUNCATED_RISING_EXPONENTIAL
    if pul.get("gamma_hz") is not None and pul.get("tau_p_s") is not None:
        out.append("pulse: gamma_hz and tau_p_s are mutually exclusive")
    if family == PulseFamily.RECTANGULAR:
        if pul.get("length_s") is None and pul.get("length_lifetimes") is None:
            out.append("pulse: rectangular family requires length_s or length_lifetimes")
    pulse = PulseConfig(
        family=family,
        p0=_check_number(out, "pulse", "p0", pul.get("p0", 1.0), lo=0, lo_open=True) or 1.0,
        gamma_hz=_check_number(out, "pulse", "gamma_hz", pul.get("gamma_hz"), lo=0, lo_open=True, optional=True),
        tau_p_s=_check_number(out, "pulse", "tau_p_s", pul.get("tau_p_s"), lo=0, lo_open=True, optional=True),
        truncation_lifetimes=_check_number(out, "pulse", "truncation_lifetimes", pul.get("truncation_lifetimes"), lo=0, lo_open=True, optional=True),
        truncation_s=_check_number(out, "pulse", "truncation_s", pul.get("truncation_s"), lo=0, lo_open=True, optional=True),
        length_lifetimes=_check_number(out, "pulse", "length_lifetimes", pul.get("length_lifetimes"), lo=0, lo_open=True, optional=True),
        length_s=_check_number(out, "pulse", "length_s", pul.get("length_s"), lo=0, lo_open=True, optional=True),
    )

    gri = _section(out, data, "grid", {"sampling_per_fsr", "window_lifetimes", "t_start_fraction"})
    gdef = GridConfig()
    grid = GridConfig(
        sampling_per_fsr=_check_number(out, "grid", "sampling_per_fsr", gri.get("sampling_per_fsr", gdef.sampling_per_fsr), lo=0, lo_open=True) or gdef.sampling_per_fsr,
        window_lifetimes=_check_number(out, "grid", "window_lifetimes", gri.get("window_lifetimes", gdef.window_lifetimes), lo=0, lo_open=True) or gdef.window_lifetimes,
        t_start_fraction=_check_number(out, "grid", "t_start_fraction", gri.get("t_start_fraction", gdef.t_start_fraction), lo=0, hi=1, lo_open=True) or gdef.t_start_fraction,
    )

    oup = _section(out, data, "output", {"max_rows", "plots"})
    odef = OutputConfig()
    max_rows = oup.get("max_rows", odef.max_rows)
    if max_rows is not None:
        checked = _check_number(out, "output", "max_rows", max_rows, lo=2)
        max_rows = int(checked) if checked is not None else odef.max_rows
    plots = oup.get("plots", odef.plots)
    if not isinstance(plots, bool):
        out.append(f"output.plots: expected true/false, got {plots!r}")
        plots = odef.plots
    output = OutputConfig(max_rows=max_rows, plots=plots)

    swe = _section(
        out,
        data,
        "sweep",
        {"points", "t_values_lifetimes", "loss_fractions", "tau_p_values_lifetimes", "r1_values", "r2_values"},
    )
    sdef = SweepConfig()
    points = _check_number(out, "sweep", "points", swe.get("points", sdef.points), lo=1)
    sweep = SweepConfig(
        points=int(points) if points is not None else sdef.points,
        t_values_lifetimes=_number_list(out, "sweep", "t_values_lifetimes", swe),
        loss_fractions=_number_list(out, "sweep", "loss_fractions", swe),
        tau_p_values_lifetimes=_number_list(out, "sweep", "tau_p_values_lifetimes", swe),
        r1_values=_number_list(out, "sweep", "r1_values", swe),
        r2_values=_number_list(out, "sweep", "r2_values", swe),
    )

    opt = _section(
        out,
        data,
        "optimize",
        {
            "family",
            "segments",
            "support_lifetimes",
            "tau_p_bounds_lifetimes",
            "truncation_bounds_lifetimes",
            "amplitude_bounds",
            "max_evaluations",
            "tolerance",
        },
    )
    odef2 = OptimizeConfig()
    ofamily = opt.get("family", odef2.family)
    from .experiments import PIECEWISE_FAMILY

    if ofamily not in (PulseFamily.RISING_EXPONENTIAL_RATE, PIECEWISE_FAMILY):
        out.append(f"optimize.family: {ofamily!r} is not an optimizable family")
        ofamily = odef2.family
    segments = _check_number(out, "optimize", "segments", opt.get("segments", odef2.segments), lo=1, hi=64)
    max_evals = _check_number(out, "optimize", "max_evaluations", opt.get("max_evaluations", odef2.max_evaluations), lo=1)
    optimize = OptimizeConfig(
        family=ofamily,
        segments=int(segments) if segments is not None else odef2.segments,
        support_lifetimes=_check_number(out, "optimize", "support_lifetimes", opt.get("support_lifetimes", odef2.support_lifetimes), lo=0, lo_open=True) or odef2.support_lifetimes,
        tau_p_bounds_lifetimes=_bounds(out, "optimize", "tau_p_bounds_lifetimes", opt, odef2.tau_p_bounds_lifetimes),
        truncation_bounds_lifetimes=_bounds(out, "optimize", "truncation_bounds_lifetimes", opt, odef2.truncation_bounds_lifetimes),
        amplitude_bounds=_bounds(out, "optimize", "amplitude_bounds", opt, odef2.amplitude_bounds, lo=0.0),
        max_evaluations=int(max_evals) if max_evals is not None else odef2.max_evaluations,
        tolerance=_check_number(out, "optimize", "tolerance", opt.get("tolerance", odef2.tolerance), lo=0, lo_open=True) or odef2.tolerance,
    )

    if out:
        raise SchemaError(out)
    return RunConfig(
        cavity=cavity, pulse=pulse, grid=grid, output=output, sweep=sweep, optimize=optimize
    )


def _number_list(out, section, key, raw) -> tuple:
    value = raw.get(key, ())
    if not isinstance(value, (list, tuple)):
        out.append(f"{section}.{key}: expected an array of numbers")
        return ()
    items = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, _NUMBER):
            out.append(f"{section}.{key}[{i}]: expected a number, got {item!r}")
        else:
            items.append(float(item))
    return tuple(items)


def _bounds(out, section, key, raw, default, lo=None) -> tuple:
    value = raw.get(key, default)
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(isinstance(v, bool) or not isinstance(v, _NUMBER) for v in value)
    ):
        out.append(f"{section}.{key}: expected [low, high]")
        return tuple(default)
    low, high = float(value[0]), float(value[1])
    if not low < high:
        out.append(f"{section}.{key}: low must be < high")
        return tuple(default)
    if lo is not None and low < lo:
        out.append(f"{section}.{key}: low must be >= {lo}")
        return tuple(default)
    return (low, high)
