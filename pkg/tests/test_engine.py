import numpy as np
import pytest

from fpcavity import (
    CavityParams,
    GridMismatch,
    GridTooCoarse,
    PulseFamily,
    PulseSpec,
    RangeError,
    SampledField,
    TimeGrid,
    WindowTooShort,
    ZeroIncidentEnergy,
    analytic_spectrum,
    energy_trace,
    free_decay,
    highfinesse_reflection,
    matched_pulse_spec,
    propagate,
    pulse_energy,
    roundtrip_oracle,
    sample_pulse,
    to_field,
    to_spectrum,
)

from conftest import grid_for, rel_rms


def matched_field(params, window_lifetimes=120.0, p0=1.0):
    grid = grid_for(params, window_lifetimes)
    return sample_pulse(matched_pulse_spec(params, p0), grid)


class TestTransforms:
    def test_round_trip_identity(self, fast_cavity):
        field = matched_field(fast_cavity)
        back = to_field(to_spectrum(field))
        assert np.max(np.abs(back.values - field.values)) < 1e-12

    def test_forward_matches_closed_form(self, fast_cavity):
        grid = grid_for(fast_cavity, 120.0)
        spec = matched_pulse_spec(fast_cavity)
        discrete = to_spectrum(sample_pulse(spec, grid))
        closed = analytic_spectrum(spec, grid)
        k = int(np.argmin(np.abs(grid.frequencies_sorted())))
        assert discrete.values[k] == pytest.approx(closed.values[k], rel=1e-3)


class TestPropagateMatchedPulse:
    def test_reflection_vanishes_while_driving(self, fast_cavity):
        field = matched_field(fast_cavity)
        result = propagate(fast_cavity, field, allow_coarse_grid=True)
        t = field.grid.times()
        driving = t < 0.0
        rms = np.sqrt(np.mean(np.abs(result.reflected.values[driving]) ** 2))
        assert rms <= 1e-3

    def test_reflected_tail_is_time_reverse(self, fast_cavity):
        field = matched_field(fast_cavity)
        result = propagate(fast_cavity, field, allow_coarse_grid=True)
        t = field.grid.times()
        gamma = fast_cavity.gamma
        tail = (t > 1.0 / gamma) & (t < 10.0 / gamma)
        expected = np.exp(-gamma * t[tail])
        assert rel_rms(result.reflected.values[tail], expected) < 1e-3

    def test_efficiency_peaks_at_unity(self, fast_cavity):
        field = matched_field(fast_cavity)
        result = propagate(fast_cavity, field, allow_coarse_grid=True)
        trace = energy_trace(result)
        assert trace.epsilon_max == pytest.approx(1.0, abs=1e-3)
        t_peak = field.grid.times()[trace.t_max_index]
        assert abs(t_peak) < 3.0 / fast_cavity.gamma

    def test_charging_is_monotone(self, fast_cavity):
        field = matched_field(fast_cavity)
        result = propagate(fast_cavity, field, allow_coarse_grid=True)
        trace = energy_trace(result)
        t = field.grid.times()
        charging = trace.epsilon[(t > -20.0 / fast_cavity.gamma) & (t < 0.0)]
        assert np.all(np.diff(charging) >= -1e-12)

    def test_energy_returns_after_decay(self, fast_cavity):
        field = matched_field(fast_cavity)
        result = propagate(fast_cavity, field, allow_coarse_grid=True)
        trace = energy_trace(result)
        assert abs(trace.epsilon[-1]) < 1e-6

    def test_causal_energy_flow(self, fast_cavity):
        # for the smooth matched envelope the running balance never goes
        # negative beyond 1e-9 of the incident energy
        field = matched_field(fast_cavity)
        result = propagate(fast_cavity, field, allow_coarse_grid=True)
        flux = (
            np.abs(result.incident.values) ** 2
            - np.abs(result.reflected.values) ** 2
            - np.abs(result.transmitted.values) ** 2
        )
        eps = np.cumsum(flux) * field.grid.dt / pulse_energy(field)
        assert eps.min() >= -1e-9

    def test_spectral_time_reversal_identity(self, reference_cavity):
        # in closed form the reflected spectrum of the matched pulse is the
        # complex conjugate of the incident spectrum, bin by bin
        grid = grid_for(reference_cavity, 60.0)
        spec = matched_pulse_spec(reference_cavity)
        incident = analytic_spectrum(spec, grid).values
        reflected = highfinesse_reflection(reference_cavity, grid) * incident
        assert np.max(np.abs(reflected - np.conj(incident))) < 1e-18

    def test_linearity(self, fast_cavity):
        field = matched_field(fast_cavity)
        scaled = SampledField(field.grid, 2.0 * field.values)
        a = propagate(fast_cavity, field, allow_coarse_grid=True)
        b = propagate(fast_cavity, scaled, allow_coarse_grid=True)
        assert np.allclose(
            b.reflected.values, 2.0 * a.reflected.values, rtol=1e-12, atol=0.0
        )
        # the stored-energy fraction is scale free
        assert energy_trace(b).epsilon_max == pytest.approx(
            energy_trace(a).epsilon_max, rel=1e-12
        )


class TestRoundtripOracle:
    def test_impulse_response(self):
        params = CavityParams(nu_fsr=1e10, r1=0.9, r2=0.95)
        dt = params.tau / 10.0
        grid = TimeGrid(t_start=0.0, dt=dt, n=256)
        u = np.zeros(grid.n, dtype=np.complex128)
        u[3] = 1.0
        result = roundtrip_oracle(params, SampledField(grid, u))
        refl = result.reflected.values
        trans = result.transmitted.values
        q = params.r1 * params.r2
        assert refl[3] == pytest.approx(-params.r1, rel=1e-15)
        for k in range(1, 5):
            expected = params.t1**2 * params.r2 * q ** (k - 1)
            assert refl[3 + 10 * k] == pytest.approx(expected, rel=1e-14)
        assert trans[3 + 5] == pytest.approx(params.t1 * params.t2, rel=1e-15)
        assert trans[3 + 15] == pytest.approx(params.t1 * params.t2 * q, rel=1e-14)

    @pytest.mark.parametrize("r1,r2", [(0.9, 1.0), (0.95, 0.97), (0.99, 0.9)])
    def test_agrees_with_spectral_path(self, r1, r2):
        params = CavityParams(nu_fsr=1e10, r1=r1, r2=r2)
        grid = grid_for(params, 90.0, samples_per_fsr=10.0)
        field = sample_pulse(matched_pulse_spec(params), grid)
        spectral = propagate(params, field, allow_coarse_grid=True)
        direct = roundtrip_oracle(params, field)
        assert rel_rms(spectral.reflected.values, direct.reflected.values) < 1e-6
        if r2 < 1.0:
            assert rel_rms(
                spectral.transmitted.values, direct.transmitted.values
            ) < 1e-6

    def test_rejects_odd_sample_ratio(self, fast_cavity):
        grid = grid_for(fast_cavity, 60.0)  # tau/dt = 5
        field = sample_pulse(matched_pulse_spec(fast_cavity), grid)
        with pytest.raises(GridMismatch):
            roundtrip_oracle(fast_cavity, field)


class TestEnergyTrace:
    def test_zero_input_rejected(self, fast_cavity):
        grid = grid_for(fast_cavity, 60.0)
        zero = SampledField(grid, np.zeros(grid.n, dtype=np.complex128))
        result = propagate(fast_cavity, zero, allow_coarse_grid=True)
        with pytest.raises(ZeroIncidentEnergy):
            energy_trace(result)

    def test_bounded_between_zero_and_one(self, fast_cavity):
        grid = grid_for(fast_cavity, 120.0)
        spec = PulseSpec(PulseFamily.RECTANGULAR, 1.0, 3.0 / fast_cavity.gamma)
        result = propagate(
            fast_cavity, sample_pulse(spec, grid), allow_coarse_grid=True
        )
        trace = energy_trace(result)
        assert trace.epsilon.min() >= 0.0
        assert trace.epsilon.max() <= 1.0 + 1e-6


class TestGuards:
    def test_coarse_grid_rejected_by_default(self, fast_cavity):
        grid = grid_for(fast_cavity, 600.0, samples_per_fsr=2.0)
        field = sample_pulse(matched_pulse_spec(fast_cavity), grid)
        with pytest.raises(GridTooCoarse):
            propagate(fast_cavity, field)

    def test_short_window_rejected_by_default(self, fast_cavity):
        field = matched_field(fast_cavity, window_lifetimes=120.0)
        with pytest.raises(WindowTooShort):
            propagate(fast_cavity, field)

    def test_full_spec_grid_accepted(self, fast_cavity):
        field = matched_field(fast_cavity, window_lifetimes=510.0)
        result = propagate(fast_cavity, field)
        assert energy_trace(result).epsilon_max == pytest.approx(1.0, abs=1e-3)

    def test_guard_band_violation(self, fast_cavity):
        grid = grid_for(fast_cavity, 120.0)
        values = np.ones(grid.n, dtype=np.complex128)
        with pytest.raises(WindowTooShort):
            propagate(fast_cavity, SampledField(grid, values), allow_coarse_grid=True)


class TestFreeDecay:
    def test_energy_normalization(self, fast_cavity):
        grid = grid_for(fast_cavity, 60.0, pre_fraction=0.2)
        field = free_decay(fast_cavity, 0.37, grid)
        assert pulse_energy(field) == pytest.approx(0.37, rel=1e-6)

    def test_decay_rate(self, fast_cavity):
        grid = grid_for(fast_cavity, 60.0, pre_fraction=0.2)
        field = free_decay(fast_cavity, 1.0, grid)
        t = grid.times()
        gamma = fast_cavity.gamma
        window = (t > 1.0 / gamma) & (t < 10.0 / gamma)
        slope = np.polyfit(t[window], np.log(np.abs(field.values[window])), 1)[0]
        assert slope == pytest.approx(-gamma, rel=1e-3)

    def test_conjugate_reverse_is_matched_pulse(self, fast_cavity):
        grid = grid_for(fast_cavity, 60.0, pre_fraction=0.2)
        field = free_decay(fast_cavity, 1.0, grid)
        t = grid.times()
        gamma = fast_cavity.gamma
        # skip the t = 0 sample itself: the incident pulse convention leaves
        # that single bin on the driving side of the handoff
        window = (t >= grid.dt) & (t < 15.0 / gamma)
        reversed_conj = np.conj(field.values[window][::-1])
        template = np.exp(gamma * (-t[window][::-1]))
        scale = np.vdot(template, reversed_conj) / np.vdot(template, template)
        assert rel_rms(reversed_conj, scale * template) < 1e-3

    def test_zero_fraction(self, fast_cavity):
        grid = grid_for(fast_cavity, 60.0, pre_fraction=0.2)
        field = free_decay(fast_cavity, 0.0, grid)
        assert not np.any(field.values)

    def test_grid_must_reach_positive_times(self, fast_cavity):
        grid = TimeGrid(t_start=-1e-5, dt=2e-11, n=1000)
        with pytest.raises(WindowTooShort):
            free_decay(fast_cavity, 1.0, grid)

    def test_negative_fraction_rejected(self, fast_cavity):
        grid = grid_for(fast_cavity, 60.0, pre_fraction=0.2)
        with pytest.raises(RangeError):
            free_decay(fast_cavity, -0.1, grid)
