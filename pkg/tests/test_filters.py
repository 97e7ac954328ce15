import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpcavity import CavityParams, NotSingleEnded, TimeGrid
from fpcavity.filters import (
    filter_response,
    highfinesse_reflection,
    highfinesse_reflection_at,
    reflection_at,
    reflection_phase_approx,
    reflection_response,
    transmission_at,
    transmission_response,
)

from conftest import grid_for

reflectivities = st.floats(min_value=0.5, max_value=0.99999)


class TestReflection:
    def test_symmetric_resonant_null(self):
        params = CavityParams(nu_fsr=1e10, r1=0.9, r2=0.9)
        assert reflection_at(params, np.array([0.0]))[0] == 0.0

    def test_single_ended_resonant_unity(self):
        params = CavityParams(nu_fsr=1e10, r1=0.9999, r2=1.0)
        value = reflection_at(params, np.array([0.0]))[0]
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_half_fsr_modulus(self):
        # (r1+r2)/(1+r1*r2) at 30-digit precision
        params = CavityParams(nu_fsr=1e10, r1=0.97, r2=0.99)
        value = reflection_at(params, np.array([0.5e10]))[0]
        assert abs(value) == pytest.approx(0.999846962199663317, rel=1e-12)

    def test_grid_response_ascending_bins(self):
        params = CavityParams(nu_fsr=1e10, r1=0.9, r2=0.95)
        grid = TimeGrid(t_start=0.0, dt=2e-11, n=64)
        refl = reflection_response(params, grid)
        assert np.array_equal(refl, reflection_at(params, grid.frequencies_sorted()))

    def test_periodicity_bitwise(self):
        # bins at exact multiples of nu_fsr/4 so f/nu_fsr is a dyadic rational
        params = CavityParams(nu_fsr=8.0, r1=0.9, r2=0.95)
        f = np.arange(-16, 16) * 2.0
        a = reflection_at(params, f)
        b = reflection_at(params, f + 8.0)
        assert np.array_equal(a, b)


class TestTransmission:
    def test_symmetric_resonant_full_transmission(self):
        params = CavityParams(nu_fsr=1e10, r1=0.9, r2=0.9)
        value = transmission_at(params, np.array([0.0]))[0]
        assert abs(value) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_back_mirror_blocks(self):
        params = CavityParams(nu_fsr=1e10, r1=0.9, r2=1.0)
        f = np.linspace(-2e10, 2e10, 101)
        assert np.all(transmission_at(params, f) == 0.0)

    def test_resonant_modulus(self):
        params = CavityParams(nu_fsr=1e10, r1=0.97, r2=0.99)
        value = transmission_at(params, np.array([0.0]))[0]
        assert abs(value) == pytest.approx(0.863832962229395375, rel=1e-12)


class TestEnergyConservation:
    @settings(max_examples=30, deadline=None)
    @given(r1=reflectivities, r2=reflectivities, seed=st.integers(0, 2**32 - 1))
    def test_lossless_etalon(self, r1, r2, seed):
        params = CavityParams(nu_fsr=1e10, r1=r1, r2=r2)
        f = np.random.default_rng(seed).uniform(-5e10, 5e10, 200)
        refl = reflection_at(params, f)
        trans = transmission_at(params, f)
        total = np.abs(refl) ** 2 + np.abs(trans) ** 2
        assert np.max(np.abs(total - 1.0)) < 1e-12

    def test_response_cache_returns_same_object(self):
        params = CavityParams(nu_fsr=1e10, r1=0.95, r2=0.9)
        grid = TimeGrid(t_start=0.0, dt=2e-11, n=128)
        assert filter_response(params, grid) is filter_response(params, grid)
        resp = filter_response(params, grid)
        total = np.abs(resp.reflection) ** 2 + np.abs(resp.transmission) ** 2
        assert np.max(np.abs(total - 1.0)) < 1e-12


class TestHighFinesse:
    def test_resonant_value(self, reference_cavity):
        assert highfinesse_reflection_at(reference_cavity, np.array([0.0]))[0] == 1.0

    def test_gamma_detuning_value(self, reference_cavity):
        gamma = reference_cavity.gamma
        value = highfinesse_reflection_at(
            reference_cavity, np.array([gamma / (2 * np.pi)])
        )[0]
        assert value == pytest.approx(-1j, abs=1e-12)

    def test_requires_single_ended(self):
        params = CavityParams(nu_fsr=1e10, r1=0.9999, r2=0.999)
        with pytest.raises(NotSingleEnded):
            highfinesse_reflection_at(params, np.array([0.0]))

    def test_all_pass_modulus(self, reference_cavity):
        grid = grid_for(reference_cavity, 20.0)
        values = highfinesse_reflection(reference_cavity, grid)
        assert np.max(np.abs(np.abs(values) - 1.0)) < 1e-12

    def test_matches_exact_filter_near_resonance(self, reference_cavity):
        grid = grid_for(reference_cavity, 20.0)
        f = grid.frequencies_sorted()
        near = np.abs(2 * np.pi * f) <= 10 * reference_cavity.gamma
        exact = reflection_at(reference_cavity, f[near])
        approx = highfinesse_reflection_at(reference_cavity, f[near])
        assert np.max(np.abs(exact - approx)) <= 1e-3

    def test_exact_filter_is_all_pass_single_ended(self):
        for r1 in (0.9, 0.99, 0.9999):
            params = CavityParams(nu_fsr=1e10, r1=r1, r2=1.0)
            f = np.linspace(-5e10, 5e10, 2001)
            assert np.max(np.abs(np.abs(reflection_at(params, f)) - 1.0)) < 1e-12

    def test_unwrapped_phase_identity(self, reference_cavity):
        grid = grid_for(reference_cavity, 20.0)
        f = grid.frequencies_sorted()
        near = np.abs(2 * np.pi * f) <= 10 * reference_cavity.gamma
        phase = np.unwrap(np.angle(highfinesse_reflection_at(reference_cavity, f)))
        expected = -2.0 * np.arctan(2 * np.pi * f / reference_cavity.gamma)
        assert np.max(np.abs(phase[near] - expected[near])) < 1e-12


class TestPhaseApprox:
    def test_continuous_through_branch_point(self, reference_cavity):
        grid = grid_for(reference_cavity, 20.0)
        phi = reflection_phase_approx(reference_cavity, grid)
        f = grid.frequencies_sorted()
        df = f[1] - f[0]
        # max slope of the phase is 2/Gamma_angular; continuity means no jump
        # larger than a few times slope*step anywhere, in particular at the
        # branch point where the raw arctangent flips sign
        max_step = 4.0 * (2 * np.pi * df) * 2.0 / reference_cavity.gamma
        assert np.max(np.abs(np.diff(phi))) < max(max_step, 1e-3)

    def test_matches_exact_argument_mod_two_pi(self, reference_cavity):
        grid = grid_for(reference_cavity, 20.0)
        f = grid.frequencies_sorted()
        phi = reflection_phase_approx(reference_cavity, grid)
        exact = np.unwrap(np.angle(reflection_at(reference_cavity, f)))
        near = np.abs(2 * np.pi * f) <= 10 * reference_cavity.gamma
        diff = phi[near] - exact[near]
        wrapped = (diff + np.pi) % (2 * np.pi) - np.pi
        assert np.max(np.abs(wrapped)) < 1e-2

    def test_requires_single_ended(self):
        params = CavityParams(nu_fsr=1e10, r1=0.9999, r2=0.99)
        grid = TimeGrid(t_start=0.0, dt=2e-11, n=64)
        with pytest.raises(NotSingleEnded):
            reflection_phase_approx(params, grid)
