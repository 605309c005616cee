"""Modal states, projections, free and forced flows, conservation laws."""

import dataclasses

import numpy as np
import pytest
import scipy.integrate

from fraclab import (
    ModalState,
    ObservationRegion,
    SourceSignal,
    WaveModalState,
    modal_invariants,
    project_initial_datum,
    reconstruct,
    schrodinger_evolve,
    schrodinger_forced_evolve,
    wave_energy,
    wave_evolve,
)
from fraclab.errors import FraclabError

RNG = np.random.default_rng(20260823)


def random_state(spectrum, modes, basis="phi"):
    a = RNG.standard_normal(modes) + 1j * RNG.standard_normal(modes)
    return ModalState(coefficients=a, time=0.0, spectrum=spectrum, basis=basis)


class TestModalState:
    def test_validation(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        with pytest.raises(ValueError):
            ModalState(coefficients=np.ones((2, 2)), time=0.0, spectrum=spectrum)
        with pytest.raises(ValueError):
            ModalState(coefficients=np.array([]), time=0.0, spectrum=spectrum)
        with pytest.raises(ValueError):
            ModalState(coefficients=np.ones(spectrum.modes + 1), time=0.0, spectrum=spectrum)
        with pytest.raises(ValueError):
            ModalState(coefficients=np.array([1.0, np.nan]), time=0.0, spectrum=spectrum)
        with pytest.raises(ValueError):
            ModalState(coefficients=np.ones(2), time=0.0, spectrum=spectrum, basis="psi")

    def test_basis_change_round_trip(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        state = random_state(spectrum, 5)
        theta = state.to_basis("theta")
        scale = np.sqrt(1.0 + state.eigenvalues)
        np.testing.assert_allclose(theta.coefficients, state.coefficients * scale)
        back = theta.to_basis("phi")
        np.testing.assert_allclose(back.coefficients, state.coefficients, rtol=1e-14)
        assert state.to_basis("phi") is state

    def test_basis_change_preserves_nodal_values(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        state = random_state(spectrum, 5)
        np.testing.assert_allclose(
            reconstruct(state.to_basis("theta")), reconstruct(state), rtol=1e-12
        )


class TestProjection:
    def test_round_trip_on_eigen_combination(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 8)
        target = np.array([0.5, -1.25, 0.0, 2.0])
        u0 = spectrum.vectors[:, :4] @ target
        for basis in ("phi", "theta"):
            state = project_initial_datum(u0, spectrum, modes=4, basis=basis)
            phi_coeff = state.to_basis("phi").coefficients
            np.testing.assert_allclose(phi_coeff.real, target, atol=1e-12)
            np.testing.assert_allclose(reconstruct(state), u0, atol=1e-12)

    def test_projection_is_truncation(self, get_spectrum):
        # energy beyond the kept modes is simply dropped
        spectrum = get_spectrum(0.5, 64, 8)
        u0 = spectrum.vectors[:, :8] @ np.arange(1.0, 9.0)
        state = project_initial_datum(u0, spectrum, modes=3)
        np.testing.assert_allclose(state.coefficients.real, [1.0, 2.0, 3.0], atol=1e-12)

    def test_node_subset_reconstruction(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        state = random_state(spectrum, 6)
        full = reconstruct(state)
        idx = np.array([0, 5, 17])
        np.testing.assert_allclose(reconstruct(state, node_indices=idx), full[idx])

    def test_validation(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        with pytest.raises(ValueError):
            project_initial_datum(np.ones(10), spectrum)
        u0 = np.ones(64)
        with pytest.raises(ValueError):
            project_initial_datum(u0, spectrum, modes=0)
        with pytest.raises(ValueError):
            project_initial_datum(u0, spectrum, modes=spectrum.modes + 1)
        with pytest.raises(ValueError):
            project_initial_datum(u0, spectrum, basis="fourier")


class TestFreeFlow:
    def test_exact_phase_rotation(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        state = random_state(spectrum, 6)
        out = schrodinger_evolve(state, 0.7)
        want = state.coefficients * np.exp(1j * state.eigenvalues * 0.7)
        np.testing.assert_array_equal(out.coefficients, want)
        assert out.time == pytest.approx(0.7)

    def test_invariants_conserved(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 8)
        state = random_state(spectrum, 8)
        before = modal_invariants(state)
        for t in (0.1, 1.0, 9.4):
            after = modal_invariants(schrodinger_evolve(state, t))
            np.testing.assert_allclose(after, before, rtol=1e-14)

    def test_group_property_and_reversibility(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        state = random_state(spectrum, 6)
        two_steps = schrodinger_evolve(schrodinger_evolve(state, 0.3), 0.4)
        one_step = schrodinger_evolve(state, 0.7)
        np.testing.assert_allclose(two_steps.coefficients, one_step.coefficients, rtol=1e-13)
        back = schrodinger_evolve(schrodinger_evolve(state, 1.3), -1.3)
        np.testing.assert_allclose(back.coefficients, state.coefficients, rtol=1e-13)

    def test_invariant_values_explicit(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 3)
        lam = spectrum.eigenvalues[:2]
        state = ModalState(
            coefficients=np.array([3.0, 4.0j]), time=0.0, spectrum=spectrum
        )
        mass, energy, energy2 = modal_invariants(state)
        assert mass == pytest.approx(25.0)
        assert energy == pytest.approx(9.0 * lam[0] + 16.0 * lam[1])
        assert energy2 == pytest.approx(9.0 * lam[0] ** 2 + 16.0 * lam[1] ** 2)


class TestForcedFlow:
    def test_zero_source_reduces_to_free_flow(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        region = ObservationRegion.boundary_layers(0.3)
        n_nodes = len(region.node_indices(spectrum.grid))
        state = random_state(spectrum, 6)
        source = SourceSignal(values=np.zeros((41, n_nodes)), dt=0.025)
        forced = schrodinger_forced_evolve(state, source, region)
        free = schrodinger_evolve(state, source.duration)
        np.testing.assert_allclose(forced.coefficients, free.coefficients, rtol=1e-15)

    def test_constant_source_closed_form(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 4)
        region = ObservationRegion.boundary_layers(0.3)
        idx = region.node_indices(spectrum.grid)
        state = random_state(spectrum, 4)
        profile = np.cos(spectrum.grid.nodes[idx])
        m = 2001
        dt = 1.0 / (m - 1)
        source = SourceSignal(values=np.tile(profile, (m, 1)), dt=dt)
        out = schrodinger_forced_evolve(state, source, region)
        lam = state.eigenvalues
        f = spectrum.h * (spectrum.vectors[idx, :4].T @ profile)
        T = source.duration
        want = np.exp(1j * lam * T) * state.coefficients - (f / lam) * (
            np.exp(1j * lam * T) - 1.0
        )
        np.testing.assert_allclose(out.coefficients, want, rtol=1e-10)

    def test_time_varying_source_against_ode_solver(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 5)
        region = ObservationRegion.boundary_layers(0.3)
        idx = region.node_indices(spectrum.grid)
        x = spectrum.grid.nodes[idx]
        state = random_state(spectrum, 5)
        lam = state.eigenvalues
        phi_region = spectrum.vectors[idx, :5]

        def node_values(t):
            return np.cos(3.0 * t) * np.exp(-(x**2)) + np.sin(t) * x

        m = 4001
        dt = 1.0 / (m - 1)
        times = dt * np.arange(m)
        source = SourceSignal(values=np.array([node_values(t) for t in times]), dt=dt)
        out = schrodinger_forced_evolve(state, source, region)

        def rhs(t, y):
            a = y[:5] + 1j * y[5:]
            f = spectrum.h * (phi_region.T @ node_values(t))
            da = 1j * lam * a - 1j * f
            return np.concatenate([da.real, da.imag])

        y0 = np.concatenate([state.coefficients.real, state.coefficients.imag])
        sol = scipy.integrate.solve_ivp(
            rhs, (0.0, 1.0), y0, method="DOP853", rtol=1e-12, atol=1e-14
        )
        want = sol.y[:5, -1] + 1j * sol.y[5:, -1]
        np.testing.assert_allclose(out.coefficients, want, rtol=1e-9, atol=1e-11)

    def test_basis_independence(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 5)
        region = ObservationRegion.boundary_layers(0.3)
        n_nodes = len(region.node_indices(spectrum.grid))
        state = random_state(spectrum, 5)
        source = SourceSignal(values=RNG.standard_normal((41, n_nodes)), dt=0.025)
        out_phi = schrodinger_forced_evolve(state, source, region)
        out_theta = schrodinger_forced_evolve(state.to_basis("theta"), source, region)
        assert out_theta.basis == "theta"
        np.testing.assert_allclose(
            out_theta.to_basis("phi").coefficients, out_phi.coefficients, rtol=1e-13
        )

    def test_validation(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 4)
        region = ObservationRegion.boundary_layers(0.3)
        n_nodes = len(region.node_indices(spectrum.grid))
        state = random_state(spectrum, 4)
        good = SourceSignal(values=np.zeros((11, n_nodes)), dt=0.1)
        with pytest.raises(TypeError):
            schrodinger_forced_evolve(state, np.zeros((11, n_nodes)), region)
        with pytest.raises(TypeError):
            schrodinger_forced_evolve(state, good, (-1.0, 1.0))
        bad_cols = SourceSignal(values=np.zeros((11, n_nodes + 2)), dt=0.1)
        with pytest.raises(ValueError):
            schrodinger_forced_evolve(state, bad_cols, region)
        with pytest.raises(ValueError):
            schrodinger_forced_evolve(state, good, region, duration=2.0)


class TestSourceSignal:
    def test_validation(self):
        with pytest.raises(ValueError):
            SourceSignal(values=np.zeros(8), dt=0.1)
        with pytest.raises(ValueError):
            SourceSignal(values=np.zeros((1, 4)), dt=0.1)
        with pytest.raises(ValueError):
            SourceSignal(values=np.zeros((4, 4)), dt=0.0)
        with pytest.raises(ValueError):
            SourceSignal(values=np.zeros((4, 4)), dt=-0.5)

    def test_duration(self):
        source = SourceSignal(values=np.zeros((11, 3)), dt=0.25)
        assert source.duration == pytest.approx(2.5)


class TestWaveFlow:
    def test_single_mode_closed_form(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 3)
        lam = spectrum.eigenvalues[0]
        state = WaveModalState(
            position=np.array([1.0]), velocity=np.array([0.5]), time=0.0, spectrum=spectrum
        )
        out = wave_evolve(state, 0.8)
        assert out.position[0] == pytest.approx(
            np.cos(lam * 0.8) + 0.5 * np.sin(lam * 0.8) / lam, rel=1e-14
        )
        assert out.velocity[0] == pytest.approx(
            -lam * np.sin(lam * 0.8) + 0.5 * np.cos(lam * 0.8), rel=1e-14
        )

    def test_energy_conserved(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        state = WaveModalState(
            position=RNG.standard_normal(6),
            velocity=RNG.standard_normal(6),
            time=0.0,
            spectrum=spectrum,
        )
        before = wave_energy(state)
        for t in (0.2, 1.7, 8.3):
            assert wave_energy(wave_evolve(state, t)) == pytest.approx(before, rel=1e-13)

    def test_reversibility(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 6)
        state = WaveModalState(
            position=RNG.standard_normal(6),
            velocity=RNG.standard_normal(6),
            time=0.0,
            spectrum=spectrum,
        )
        back = wave_evolve(wave_evolve(state, 2.1), -2.1)
        np.testing.assert_allclose(back.position, state.position, atol=1e-13)
        np.testing.assert_allclose(back.velocity, state.velocity, atol=1e-13)

    def test_energy_formula(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 3)
        lam = spectrum.eigenvalues[:2]
        state = WaveModalState(
            position=np.array([2.0, 0.0]),
            velocity=np.array([0.0, 3.0]),
            time=0.0,
            spectrum=spectrum,
        )
        assert wave_energy(state) == pytest.approx(4.0 * lam[0] ** 2 + 9.0)

    def test_nonpositive_frequency_guard(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 3)
        broken = dataclasses.replace(
            spectrum, eigenvalues=np.array([0.0, 1.0, 2.0]), ties=()
        )
        state = WaveModalState(
            position=np.ones(3), velocity=np.ones(3), time=0.0, spectrum=broken
        )
        with pytest.raises(FraclabError):
            wave_evolve(state, 1.0)

    def test_shape_validation(self, get_spectrum):
        spectrum = get_spectrum(0.5, 64, 3)
        with pytest.raises(ValueError):
            WaveModalState(
                position=np.ones(2), velocity=np.ones(3), time=0.0, spectrum=spectrum
            )
        with pytest.raises(TypeError):
            wave_evolve(random_state(spectrum, 2), 1.0)
