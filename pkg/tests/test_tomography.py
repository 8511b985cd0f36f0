import numpy as np
import pytest

from qrouter.gates import apply_circuit, named_router_circuit
from qrouter.qstate import DensityMatrix, StateVector, basis_state, to_density
from qrouter.tomography import (
    TomographyDataset,
    collect_dataset,
    exact_expectations,
    expectation,
    fidelity,
    linear_inversion,
    literal_settings_for,
    observables_for,
    pauli_matrix,
    project_to_physical,
    reconstruct,
    sample_counts,
    settings_for,
)

from ._analytic import PLUS, PSI_S


def router_states():
    for name in ["router-superposition", "router-control0", "router-control1"]:
        yield name, to_density(
            apply_circuit(named_router_circuit(name), basis_state(3, 0))
        )


class TestSettings:
    def test_one_qubit(self):
        assert settings_for(1) == ["X", "Y", "Z"]

    def test_two_qubit_order(self):
        s = settings_for(2)
        assert len(s) == 9 and s[0] == "XX" and s[-1] == "ZZ"

    def test_three_qubit_covers_all_observables(self):
        settings = settings_for(3)
        assert len(settings) == 27
        obs = observables_for(3)
        assert len(obs) == 63
        for p in obs:
            assert any(
                all(s == l for s, l in zip(setting, p) if l != "I")
                for setting in settings
            )

    def test_literal_settings_one_per_observable(self):
        assert literal_settings_for(3) == observables_for(3)

    def test_rejects_zero_qubits(self):
        with pytest.raises(ValueError):
            settings_for(0)


class TestSampleCounts:
    def test_ground_state_z(self):
        counts = sample_counts(to_density(basis_state(1, 0)), "Z", 500, 1)
        assert counts == {"0": 500}

    def test_plus_state_x(self):
        counts = sample_counts(to_density(StateVector(1, PLUS)), "X", 500, 1)
        assert counts == {"0": 500}

    def test_minus_i_state_y(self):
        psi = StateVector(1, np.array([1, -1j]) / np.sqrt(2))
        counts = sample_counts(to_density(psi), "Y", 500, 1)
        assert counts == {"1": 500}

    def test_binomial_statistics(self):
        counts = sample_counts(to_density(basis_state(1, 0)), "X", 8192, 99)
        frac = counts.get("0", 0) / 8192
        sigma = 0.5 / np.sqrt(8192)
        assert abs(frac - 0.5) < 4 * sigma

    def test_deterministic_for_fixed_seed(self):
        rho = to_density(StateVector(1, PSI_S))
        a = sample_counts(rho, "Z", 1000, 123, 0.01)
        b = sample_counts(rho, "Z", 1000, 123, 0.01)
        assert a == b

    def test_counts_sum_to_shots(self):
        rho = to_density(apply_circuit(named_router_circuit("router-superposition"), basis_state(3, 0)))
        counts = sample_counts(rho, "XYZ", 777, 5)
        assert sum(counts.values()) == 777

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError):
            sample_counts(to_density(basis_state(1, 0)), "Z", 0, 1)


class TestDataset:
    def test_collection_order_independent(self):
        rho = to_density(StateVector(1, PSI_S))
        ds = collect_dataset(rho, 200, 7)
        for i, s in enumerate(settings_for(1)):
            assert ds.counts[s] == sample_counts(rho, s, 200, 7 ^ i)

    def test_json_round_trip(self):
        ds = collect_dataset(to_density(basis_state(1, 0)), 100, 3, p_readout=0.02)
        again = TomographyDataset.from_json(ds.to_json())
        assert again == ds

    def test_json_schema_keys(self):
        data = collect_dataset(to_density(basis_state(1, 0)), 100, 3).to_json()
        assert set(data) >= {"shots", "seed", "settings", "rng"}


class TestExpectation:
    def test_all_zero_counts_give_plus_one(self):
        ds = TomographyDataset(1, 100, 0, {"Z": {"0": 100}})
        assert expectation(ds, "Z") == 1.0

    def test_uniform_counts_give_zero(self):
        ds = TomographyDataset(1, 100, 0, {"Z": {"0": 50, "1": 50}})
        assert expectation(ds, "Z") == 0.0

    def test_signal_state_z_expectation(self):
        # Born statistics of the prepared signal state: <Z> = cos(pi/4)
        rho = to_density(StateVector(1, PSI_S))
        ds = collect_dataset(rho, 8192, 11)
        est = expectation(ds, "Z")
        assert abs(est - np.cos(np.pi / 4)) < 4 / np.sqrt(8192)

    def test_averages_over_compatible_settings(self):
        ds = TomographyDataset(
            2, 100, 0, {"ZX": {"00": 100}, "ZZ": {"00": 50, "01": 50}}
        )
        # ZI is compatible with both settings; both give +1 on qubit 0
        assert expectation(ds, "ZI") == 1.0
        # IZ only via ZZ: half parity-even, half parity-odd
        assert expectation(ds, "IZ") == 0.0

    def test_no_compatible_setting(self):
        ds = TomographyDataset(1, 10, 0, {"Z": {"0": 10}})
        with pytest.raises(ValueError):
            expectation(ds, "X")

    def test_bounded(self):
        ds = collect_dataset(to_density(StateVector(1, PSI_S)), 300, 2)
        for p in observables_for(1):
            assert -1.0 <= expectation(ds, p) <= 1.0


class TestLinearInversion:
    def test_zero_state(self):
        m = linear_inversion({"X": 0.0, "Y": 0.0, "Z": 1.0}, 1)
        assert np.allclose(m, [[1, 0], [0, 0]])

    def test_maximally_mixed(self):
        m = linear_inversion({"X": 0.0, "Y": 0.0, "Z": 0.0}, 1)
        assert np.allclose(m, np.eye(2) / 2)

    def test_exact_router_state(self):
        for _, rho in router_states():
            m = linear_inversion(exact_expectations(rho), 3)
            assert np.max(np.abs(m - rho.matrix)) < 1e-9

    def test_missing_expectation(self):
        with pytest.raises(ValueError):
            linear_inversion({"X": 0.0, "Y": 0.0}, 1)


class TestProjection:
    def test_physical_input_unchanged(self):
        rho = to_density(StateVector(1, PSI_S))
        out = project_to_physical(rho.matrix)
        assert np.max(np.abs(out.matrix - rho.matrix)) < 1e-9

    def test_hand_computed_truncation(self):
        out = project_to_physical(np.diag([1.1, -0.1]).astype(complex))
        assert np.allclose(out.matrix, np.diag([1.0, 0.0]))

    def test_water_filling_redistribution(self):
        # hand-executed: zero -0.1, add -0.05 to each remaining nonzero value
        out = project_to_physical(np.diag([0.7, 0.4, -0.1, 0.0]).astype(complex))
        lam = np.sort(np.linalg.eigvalsh(out.matrix))[::-1]
        assert np.allclose(lam, [0.65, 0.35, 0.0, 0.0])

    def test_pipeline_output_is_physical(self):
        rho = to_density(apply_circuit(named_router_circuit("router-superposition"), basis_state(3, 0)))
        rec = reconstruct(collect_dataset(rho, 512, 21))
        assert isinstance(rec, DensityMatrix)
        assert abs(np.trace(rec.matrix).real - 1.0) < 1e-9

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            project_to_physical(np.array([[1.0, 1.0], [0.0, 0.0]]))

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            project_to_physical(np.eye(2, dtype=complex))


class TestReconstruct:
    def test_exact_pipeline_reproduces_input(self):
        rng = np.random.default_rng(13)
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        rho = to_density(StateVector(3, amps / np.linalg.norm(amps)))
        m = linear_inversion(exact_expectations(rho), 3)
        out = project_to_physical(m)
        assert np.max(np.abs(out.matrix - rho.matrix)) < 1e-9

    def test_statistical_consistency(self):
        # shot noise only, paper-scale budget; large-seed-majority check is
        # exercised in the acceptance suite, a small slice here
        for name, rho in router_states():
            ok = 0
            for seed in range(10):
                rec = reconstruct(collect_dataset(rho, 8192, seed))
                ok += fidelity(rec, rho) > 0.98
            assert ok >= 9, name

    def test_literal_mode_reconstruction(self):
        rho = to_density(StateVector(1, PSI_S))
        ds = collect_dataset(rho, 8192, 4, settings=literal_settings_for(1))
        rec = reconstruct(ds)
        assert fidelity(rec, rho) > 0.98


class TestFidelity:
    def test_self_fidelity(self):
        for _, rho in router_states():
            assert abs(fidelity(rho, rho) - 1.0) < 1e-9

    def test_orthogonal_states(self):
        a = to_density(basis_state(1, 0))
        b = to_density(basis_state(1, 1))
        assert fidelity(a, b) < 1e-9

    def test_mixed_vs_pure_closed_form(self):
        # Tr sqrt(sqrt(rho) sigma sqrt(rho)) = sqrt(<0|I/2|0>) = 1/sqrt(2)
        mixed = DensityMatrix(1, np.eye(2) / 2)
        assert abs(fidelity(mixed, to_density(basis_state(1, 0))) - 1 / np.sqrt(2)) < 1e-9

    def test_symmetric(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        a = a @ a.conj().T
        rho = DensityMatrix(2, a / np.trace(a))
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        b = b @ b.conj().T
        sigma = DensityMatrix(2, b / np.trace(b))
        assert abs(fidelity(rho, sigma) - fidelity(sigma, rho)) < 1e-9

    def test_unitary_invariance(self):
        from qrouter.gates import circuit_unitary, fredkin_circuit

        u = circuit_unitary(fredkin_circuit(0, 1, 2))
        items = list(router_states())
        rho, sigma = items[0][1], items[1][1]
        rho_u = DensityMatrix(3, u @ rho.matrix @ u.conj().T)
        sigma_u = DensityMatrix(3, u @ sigma.matrix @ u.conj().T)
        assert abs(fidelity(rho, sigma) - fidelity(rho_u, sigma_u)) < 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(to_density(basis_state(1, 0)), to_density(basis_state(2, 0)))


class TestPauliMatrix:
    def test_single_letters(self):
        assert np.allclose(pauli_matrix("Z"), np.diag([1, -1]))
        assert np.allclose(pauli_matrix("Y"), [[0, -1j], [1j, 0]])

    def test_qubit_zero_is_leftmost(self):
        zi = pauli_matrix("ZI")
        assert np.allclose(zi, np.diag([1, 1, -1, -1]))
