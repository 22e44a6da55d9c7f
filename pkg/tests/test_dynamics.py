import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavityqed.dynamics import (
    Propagator,
    ZeroProbabilityError,
    analytic_ghz4_evolution,
    analytic_w_evolution,
    distillation_probability,
    evolve,
    evolve_timedep,
    excitation_sector,
    max_w_magnitude_gap,
    measure_atom,
    to_interaction_frame,
)
from cavityqed.entanglement import fidelity_to, make_target
from cavityqed.hilbert import (
    BasisDescriptor,
    BasisMismatchError,
    StateVector,
    basis_state,
    excitation_number,
    excited_projector,
    inner_product,
)
from cavityqed.models import ModelParams, full_hamiltonian_at, static_frame_hamiltonian, vacuum_sector_hamiltonian

from conftest import random_state

LAMBDA_T_GRID = np.linspace(0.05, 2 * np.pi, 20)


def vacuum_propagator(n):
    return Propagator(vacuum_sector_hamiltonian(ModelParams.unit_exchange(n)))


def fidelity(a, b):
    return abs(inner_product(a, b)) ** 2


class TestPropagator:
    def test_spectral_reconstruction(self):
        prop = vacuum_propagator(4)
        v, e = prop.eigenvectors, prop.energies
        h = prop.hamiltonian.matrix
        assert np.max(np.abs(v @ np.diag(e) @ v.conj().T - h)) <= 1e-9 * np.max(np.abs(h))
        assert np.max(np.abs(v.conj().T @ v - np.eye(16))) <= 1e-10

    def test_zero_time_is_identity(self, rng):
        psi = random_state(rng, BasisDescriptor(3))
        np.testing.assert_allclose(evolve(vacuum_propagator(3), psi, 0.0).amplitudes, psi.amplitudes, atol=1e-14)

    def test_w3_closed_form_amplitudes(self):
        lt = 2 * np.pi / 9
        psi = evolve(vacuum_propagator(3), basis_state(BasisDescriptor(3), "001"), lt)
        ph = np.exp(-3j * lt)
        assert abs(psi.amplitude("001") - (ph + 2) / 3) <= 1e-9
        for bits in ("010", "100"):
            assert abs(psi.amplitude(bits) - (ph - 1) / 3) <= 1e-9

    def test_eigenstate_acquires_phase(self):
        prop = vacuum_propagator(3)
        sym = StateVector(BasisDescriptor(3), np.where(np.isin(np.arange(8), [1, 2, 4]), 3**-0.5, 0))
        out = prop.evolve(sym, 0.37)
        np.testing.assert_allclose(out.amplitudes, np.exp(-3j * 0.37) * sym.amplitudes, atol=1e-12)

    def test_basis_mismatch(self):
        with pytest.raises(BasisMismatchError):
            vacuum_propagator(3).evolve(basis_state(BasisDescriptor(2), "01"), 1.0)

    def test_composition(self, rng):
        prop = Propagator(static_frame_hamiltonian(ModelParams(2, g=1.0, delta=3.0)))
        psi = random_state(rng, prop.basis)
        two_step = prop.evolve(prop.evolve(psi, 0.8), 1.9)
        np.testing.assert_allclose(two_step.amplitudes, prop.evolve(psi, 2.7).amplitudes, atol=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), t=st.floats(-50, 50), n=st.integers(1, 4))
    def test_unitarity_and_excitation_conservation(self, seed, t, n):
        rng = np.random.default_rng(seed)
        prop = vacuum_propagator(n)
        psi = random_state(rng, prop.basis)
        out = prop.evolve(psi, t)
        assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0, abs=1e-9)
        ne = excitation_number(prop.basis)
        assert ne.expectation(out).real == pytest.approx(ne.expectation(psi).real, abs=1e-9)


class TestTimeDependent:
    def test_decoupled_is_identity(self):
        p = ModelParams(2, g=0.0, delta=3.0)
        psi = basis_state(p.basis, "10", 1)
        np.testing.assert_allclose(evolve_timedep(p, psi, 4.0).amplitudes, psi.amplitudes, atol=1e-14)

    def test_dispersive_envelope(self):
        p = ModelParams(1, g=1.0, delta=10.0)
        psi0 = basis_state(p.basis, "1", 0)
        pop = excited_projector(p.basis, 0)
        # Rabi oracle: P_excited >= 1 - 4 g^2 / (delta^2 + 4 g^2) >= 1 - 4 (g/delta)^2
        for t in (1.3, 2.9, 5.0):
            e = pop.expectation(evolve_timedep(p, psi0, t)).real
            assert 1 - 4 * (p.g / p.delta) ** 2 <= e <= 1 + 1e-12

    def test_norm_and_convergence(self):
        p = ModelParams(1, g=1.0, delta=10.0)
        psi0 = basis_state(p.basis, "1", 0)
        h_norm = max(np.linalg.norm(full_hamiltonian_at(p, 0).matrix, 2), p.delta)
        default_dt = 0.05 / h_norm / 50
        a = evolve_timedep(p, psi0, 5.0)
        b = evolve_timedep(p, psi0, 5.0, dt_max=default_dt / 2)
        assert np.linalg.norm(a.amplitudes) == pytest.approx(1, abs=1e-8)
        assert np.linalg.norm(a.amplitudes - b.amplitudes) <= 1e-6

    def test_agrees_with_static_frame(self):
        p = ModelParams(2, g=1.0, delta=10.0)
        psi0 = basis_state(p.basis, "10", 0)
        static = to_interaction_frame(Propagator(static_frame_hamiltonian(p)).evolve(psi0, 1.0), p, 1.0)
        assert fidelity(evolve_timedep(p, psi0, 1.0), static) >= 1 - 1e-6

    def test_rejects_bad_step(self):
        p = ModelParams(1, g=1.0, delta=10.0)
        with pytest.raises(ValueError):
            evolve_timedep(p, basis_state(p.basis, "1", 0), 1.0, dt_max=0.0)


class TestAnalyticW:
    def test_w3_point(self):
        psi = analytic_w_evolution(3, 2 * np.pi / 9)
        mags = [abs(psi.amplitude(b)) for b in ("001", "010", "100")]
        np.testing.assert_allclose(mags, [3**-0.5] * 3, atol=1e-12)
        rel = psi.amplitude("001") / psi.amplitude("010")
        assert np.angle(rel) == pytest.approx(2 * np.pi / 3, abs=1e-12)

    def test_zero_time(self):
        psi = analytic_w_evolution(4, 0.0)
        np.testing.assert_allclose(psi.amplitudes, basis_state(BasisDescriptor(4), "0001").amplitudes, atol=0)

    def test_n5_half_period(self):
        lt = np.pi / 5
        psi = analytic_w_evolution(5, lt)
        numeric = vacuum_propagator(5).evolve(basis_state(BasisDescriptor(5), "00001"), lt)
        assert psi.amplitude("00001") == pytest.approx(3 / 5, abs=1e-12)
        assert numeric.amplitude("00001") == pytest.approx(3 / 5, abs=1e-9)
        for bits in ("10000", "01000", "00100", "00010"):
            assert psi.amplitude(bits) == pytest.approx(-2 / 5, abs=1e-12)
            assert numeric.amplitude(bits) == pytest.approx(-2 / 5, abs=1e-9)

    def test_rejects_single_atom(self):
        with pytest.raises(ValueError):
            analytic_w_evolution(1, 0.3)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_oracle_equivalence(self, n):
        prop = vacuum_propagator(n)
        psi0 = basis_state(BasisDescriptor(n), "0" * (n - 1) + "1")
        for lt in LAMBDA_T_GRID:
            assert fidelity(analytic_w_evolution(n, lt), prop.evolve(psi0, lt)) >= 1 - 1e-9


class TestGHZ4:
    def test_corrected_class_point(self):
        psi = analytic_ghz4_evolution(np.pi / 3, "corrected")
        assert abs(psi.amplitude("0011")) == pytest.approx(0.5, abs=1e-12)
        assert abs(psi.amplitude("1100")) == pytest.approx(np.sqrt(3) / 2, abs=1e-12)
        for bits in ("1001", "0101", "1010", "0110"):
            assert abs(psi.amplitude(bits)) < 1e-12
        assert psi.amplitude("0011") == pytest.approx(np.exp(-1j * np.pi / 3) / 2, abs=1e-12)
        assert psi.amplitude("1100") == pytest.approx(np.exp(-1j * np.pi / 3) * 1j * np.sqrt(3) / 2, abs=1e-12)

    def test_printed_variant_lands_on_1100(self):
        psi = analytic_ghz4_evolution(np.pi / 3, "printed")
        assert abs(psi.amplitude("1100")) ** 2 == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("lt", [0.1, 0.5, 1.0, 2.0])
    def test_corrected_matches_numerical(self, lt):
        numeric = vacuum_propagator(4).evolve(basis_state(BasisDescriptor(4), "0011"), lt)
        assert fidelity(analytic_ghz4_evolution(lt), numeric) >= 1 - 1e-9

    def test_printed_disagrees_with_numerical(self):
        numeric = vacuum_propagator(4).evolve(basis_state(BasisDescriptor(4), "0011"), 1.0)
        assert fidelity(analytic_ghz4_evolution(1.0, "printed"), numeric) < 0.99

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            analytic_ghz4_evolution(1.0, "other")


class TestMeasurement:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    @pytest.mark.parametrize("lt", [0.3, 1.1, 2.5])
    def test_distills_maximal_w(self, n, lt):
        rec = measure_atom(analytic_w_evolution(n, lt), n - 1, 0)
        assert rec.probability == pytest.approx(abs(np.sqrt(n - 1) / n * (np.exp(-1j * n * lt) - 1)) ** 2, abs=1e-12)
        assert fidelity_to(rec.post_state, make_target("W", n - 1)) == pytest.approx(1, abs=1e-12)
        assert np.linalg.norm(rec.post_state.amplitudes) == pytest.approx(1, abs=1e-12)

    def test_product_state(self):
        rec = measure_atom(basis_state(BasisDescriptor(3), "001"), 2, 1)
        assert rec.probability == 1
        np.testing.assert_array_equal(rec.post_state.amplitudes, basis_state(BasisDescriptor(2), "00").amplitudes)

    def test_zero_probability(self):
        with pytest.raises(ZeroProbabilityError):
            measure_atom(basis_state(BasisDescriptor(3), "001"), 2, 0)

    def test_with_cavity(self):
        b = BasisDescriptor(2, 2)
        amps = np.zeros(b.dim)
        amps[b.encode("10", 1)] = amps[b.encode("01", 0)] = 2**-0.5
        rec = measure_atom(StateVector(b, amps), 0, 1)
        assert rec.probability == pytest.approx(0.5)
        assert rec.post_state.basis == BasisDescriptor(1, 2)
        assert abs(rec.post_state.amplitude("0", 1)) == pytest.approx(1)

    def test_bad_index(self):
        with pytest.raises(IndexError):
            measure_atom(basis_state(BasisDescriptor(2), "00"), 2, 0)


class TestDistillation:
    def test_four_atoms_at_half_period(self):
        assert distillation_probability(4, np.pi / 4) == pytest.approx(3 / 4, abs=1e-12)
        rec = measure_atom(vacuum_propagator(4).evolve(basis_state(BasisDescriptor(4), "0001"), np.pi / 4), 3, 0)
        assert rec.probability == pytest.approx(3 / 4, abs=1e-9)

    def test_zero_time(self):
        assert distillation_probability(5, 0.0) == 0

    def test_maximum_shrinks_like_inverse_n(self):
        grid = np.linspace(0, 2 * np.pi, 4001)
        maxima = []
        for n in range(3, 12):
            p = np.array([distillation_probability(n, lt) for lt in grid / n])
            maxima.append(p.max())
            assert p.max() == pytest.approx(4 * (n - 1) / n**2, abs=1e-9)
            assert grid[p.argmax()] == pytest.approx(np.pi, abs=2e-3)
        assert np.all(np.diff(maxima) < 0)
        scaled = np.array(maxima) * np.arange(3, 12)
        assert np.all(np.diff(np.abs(scaled - 4)) < 0)

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            distillation_probability(2, 1.0)


def test_maximal_w_only_up_to_four_atoms():
    for n in (2, 3, 4):
        assert max_w_magnitude_gap(n) <= 1e-3
    for n in (5, 6, 7):
        assert max_w_magnitude_gap(n) >= 0.09


def test_excitation_sector():
    assert excitation_sector(4, 2) == [3, 5, 6, 9, 10, 12]
    assert excitation_sector(3, 0) == [0]
