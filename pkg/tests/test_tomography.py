"""Readout scheme coverage, reconstruction, and sampled measurement."""

import numpy as np
import pytest

from conftest import random_density_matrix
from spintop.core import (
    COEFFICIENT_LABELS,
    DensityMatrix,
    fidelity,
    pauli_basis_coefficients,
    two_qubit_pauli,
)
from spintop.gates import Circuit, GateKind, circuit_unitary, y90
from spintop.tomography import (
    BASIS_STRINGS,
    ConfusionMatrix,
    ReadoutExperiment,
    TomographyScheme,
    counts_to_distribution,
    default_scheme,
    measure_coefficients,
    nmr_observables,
    reconstruct,
    sample_readout,
)


class TestObservables:
    def test_spin_1_set(self):
        obs = nmr_observables(1)
        assert np.allclose(obs[0], two_qubit_pauli("x0"))
        assert np.allclose(obs[1], two_qubit_pauli("xz"))
        assert np.allclose(obs[2], two_qubit_pauli("y0"))
        assert np.allclose(obs[3], two_qubit_pauli("yz"))

    def test_spin_2_set_is_mirrored(self):
        obs = nmr_observables(2)
        assert np.allclose(obs[0], two_qubit_pauli("0x"))
        assert np.allclose(obs[2], two_qubit_pauli("0y"))

    def test_hermitian_and_traceless(self):
        for spin in (1, 2):
            for obs in nmr_observables(spin):
                assert np.allclose(obs, obs.conj().T)
                assert abs(np.trace(obs)) < 1e-14

    def test_invalid_spin(self):
        with pytest.raises(ValueError, match="spin"):
            nmr_observables(3)


class TestScheme:
    def test_six_experiments_cover_fifteen_labels_once(self):
        scheme = default_scheme()
        assert len(scheme.experiments) == 6
        labels = [label for e in scheme.experiments for label in e.yields]
        assert sorted(labels) == sorted(COEFFICIENT_LABELS)

    def test_anchor_z_readout_present(self):
        # A y-rotation on spin 1 must recover z0 through the sigma_x
        # observable of that spin.
        scheme = default_scheme()
        anchor = None
        for experiment in scheme.experiments:
            if "z0" in experiment.yields:
                anchor = experiment
        assert anchor is not None
        assert anchor.observed_spin == 1
        kinds = [inst.kind for inst in anchor.readout_pulse.instructions]
        assert kinds == [GateKind.Y90]

    def test_anchor_formula(self, rng):
        # c_z0 equals the sigma_x expectation after the y-rotation.
        rho = random_density_matrix(rng)
        u = circuit_unitary(Circuit((y90(1),)))
        rotated = u @ rho.matrix @ u.conj().T
        formula = np.trace(rotated @ two_qubit_pauli("x0")).real
        assert formula == pytest.approx(
            pauli_basis_coefficients(rho)[COEFFICIENT_LABELS.index("z0")], abs=1e-10
        )

    def test_ground_state_anchor_value(self):
        c = measure_coefficients(DensityMatrix.ground_state())
        assert c[COEFFICIENT_LABELS.index("z0")] == pytest.approx(1.0)

    def test_incomplete_coverage_rejected(self):
        scheme = default_scheme()
        with pytest.raises(ValueError, match="coverage"):
            TomographyScheme(experiments=scheme.experiments[:5])

    def test_wrong_extraction_rejected(self):
        good = default_scheme().experiments[0]
        with pytest.raises(ValueError, match="reproduce"):
            ReadoutExperiment(
                readout_pulse=good.readout_pulse,
                observed_spin=good.observed_spin,
                yields=good.yields,
                extraction=-good.extraction,
            )


class TestMeasure:
    def test_matches_direct_coefficients(self, rng):
        for _ in range(10):
            rho = random_density_matrix(rng)
            c = measure_coefficients(rho)
            assert np.abs(c - pauli_basis_coefficients(rho)).max() < 1e-10

    def test_maximally_mixed_gives_zeros(self):
        c = measure_coefficients(DensityMatrix.maximally_mixed())
        assert np.abs(c).max() < 1e-12

    def test_noisy_readout_perturbs_bell_slightly(self):
        bell = DensityMatrix.from_ket(np.array([1, 0, 0, 1]) / np.sqrt(2))
        clean = measure_coefficients(bell)
        noisy = measure_coefficients(bell, noisy=True)
        shift = np.abs(noisy - clean).max()
        assert 0 < shift < 0.01

    def test_sigma_noise_is_seeded(self):
        rho = DensityMatrix.ground_state()
        a = measure_coefficients(rho, sigma=0.05, seed=11)
        b = measure_coefficients(rho, sigma=0.05, seed=11)
        c = measure_coefficients(rho, sigma=0.05, seed=12)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError, match="sigma"):
            measure_coefficients(DensityMatrix.ground_state(), sigma=-0.1)


class TestReconstruct:
    def test_zero_vector_gives_maximally_mixed(self):
        result = reconstruct(np.zeros(15))
        assert np.allclose(result.state.matrix, np.eye(4) / 4)
        assert not result.projected

    def test_ground_state_round_trip(self):
        ground = DensityMatrix.ground_state()
        result = reconstruct(measure_coefficients(ground))
        assert fidelity(result.state, ground) > 1 - 1e-12
        assert not result.projected

    def test_random_round_trip(self, rng):
        for _ in range(25):
            rho = random_density_matrix(rng)
            result = reconstruct(measure_coefficients(rho))
            assert fidelity(result.state, rho) >= 1 - 1e-9

    def test_unphysical_vector_triggers_projection(self):
        c = np.zeros(15)
        c[COEFFICIENT_LABELS.index("z0")] = 1.3
        result = reconstruct(c)
        assert result.projected
        assert min(result.state.populations()) >= -1e-12
        assert np.trace(result.state.matrix).real == pytest.approx(1.0)


class TestConfusionMatrix:
    def test_identity(self):
        assert np.array_equal(ConfusionMatrix.identity().matrix, np.eye(4))

    def test_from_qubit_errors_is_kron_of_flips(self):
        cm = ConfusionMatrix.from_qubit_errors(0.1, 0.2)
        flip1 = np.array([[0.9, 0.1], [0.1, 0.9]])
        flip2 = np.array([[0.8, 0.2], [0.2, 0.8]])
        assert np.allclose(cm.matrix, np.kron(flip1, flip2))

    def test_column_sums_enforced(self):
        bad = np.eye(4) * 0.9
        with pytest.raises(ValueError, match="sum to 1"):
            ConfusionMatrix(bad)

    def test_negative_entries_rejected(self):
        bad = np.eye(4)
        bad[0, 1] = -0.1
        bad[1, 1] = 1.1
        with pytest.raises(ValueError, match="nonnegative"):
            ConfusionMatrix(bad)

    def test_error_rate_bounds(self):
        with pytest.raises(ValueError, match="epsilon_1"):
            ConfusionMatrix.from_qubit_errors(0.7, 0.1)


class TestSampleReadout:
    def test_pure_ground_all_shots_00(self):
        counts = sample_readout(DensityMatrix.ground_state(), 500, seed=3)
        assert counts == {"00": 500, "01": 0, "10": 0, "11": 0}

    def test_seed_reproducible(self):
        rho = DensityMatrix.maximally_mixed()
        cm = ConfusionMatrix.from_qubit_errors(0.05, 0.05)
        assert sample_readout(rho, 2000, cm, seed=9) == sample_readout(
            rho, 2000, cm, seed=9
        )

    def test_uniform_state_frequencies(self):
        counts = sample_readout(DensityMatrix.maximally_mixed(), 100_000, seed=5)
        freqs = counts_to_distribution(counts)
        # 4 sigma multinomial band around 1/4
        band = 4 * np.sqrt(0.25 * 0.75 / 100_000)
        assert np.abs(freqs - 0.25).max() < band

    def test_confused_distribution_matches_linear_model(self):
        populations = np.array([0.5, 0.3, 0.15, 0.05])
        rho = DensityMatrix(np.diag(populations).astype(complex))
        cm = ConfusionMatrix.from_qubit_errors(0.08, 0.12)
        counts = sample_readout(rho, 200_000, cm, seed=21)
        freqs = counts_to_distribution(counts)
        expected = cm.matrix @ populations
        sigma = np.sqrt(expected * (1 - expected) / 200_000)
        assert np.all(np.abs(freqs - expected) < 4 * sigma)

    def test_zero_shots_rejected(self):
        with pytest.raises(ValueError, match="shots"):
            sample_readout(DensityMatrix.ground_state(), 0)

    def test_counts_to_distribution_requires_shots(self):
        with pytest.raises(ValueError, match="at least one"):
            counts_to_distribution({label: 0 for label in BASIS_STRINGS})
