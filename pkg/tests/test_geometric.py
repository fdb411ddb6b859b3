"""Mixed-state geometric phase: theory curve, interferometer, sweeps."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spintop.core import DensityMatrix, partial_trace
from spintop.engine import SimulationMode, run_program
from spintop.gates import GateKind, h, ry
from spintop.geometric import (
    DEFAULT_PURITIES,
    DEFAULT_SOLID_ANGLES,
    GeometricPhaseRun,
    ancilla_visibility,
    extract_ancilla_phase,
    gamma_theory,
    geometric_phase_circuit,
    prepare_mixed_state,
    run_geometric_point,
    run_geometric_sweep,
    visibility_theory,
)

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


class TestTheory:
    @pytest.mark.parametrize("omega_deg", [60, 120, 180, 240, 300])
    def test_pure_state_gives_minus_half_omega(self, omega_deg):
        omega = math.radians(omega_deg)
        expected = -omega / 2
        while expected <= -math.pi:
            expected += 2 * math.pi
        assert gamma_theory(1.0, omega) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("r", [0.1, 0.5, 0.97])
    def test_half_turn_pins_minus_ninety(self, r):
        assert math.degrees(gamma_theory(r, math.pi)) == pytest.approx(-90.0)

    def test_quoted_point(self):
        gamma = gamma_theory(0.5, math.radians(240))
        assert math.degrees(gamma) == pytest.approx(-139.1, abs=0.05)

    def test_zero_purity_lands_on_axis(self):
        # cos positive: phase 0; cos negative: phase pi
        assert gamma_theory(0.0, math.radians(120)) == pytest.approx(0.0)
        assert abs(gamma_theory(0.0, math.radians(240))) == pytest.approx(math.pi)

    def test_zero_purity_visibility_is_cosine(self):
        omega = math.radians(240)
        assert visibility_theory(0.0, omega) == pytest.approx(
            abs(math.cos(omega / 2))
        )

    def test_purity_out_of_range(self):
        with pytest.raises(ValueError, match="purity"):
            gamma_theory(1.2, 1.0)


class TestMixedStatePreparation:
    def test_pure_limit_is_minus_x_eigenstate(self):
        rho = run_program(prepare_mixed_state(1.0))
        reduced = partial_trace(rho, keep=2)
        minus = np.array([1, -1]) / np.sqrt(2)
        expected = np.outer(minus, minus)
        assert np.abs(reduced.matrix - expected).max() < 1e-9

    def test_zero_purity_is_maximally_mixed(self):
        rho = run_program(prepare_mixed_state(0.0))
        reduced = partial_trace(rho, keep=2)
        assert np.abs(reduced.matrix - np.eye(2) / 2).max() < 1e-9

    @pytest.mark.parametrize("r", [0.26, 0.5, 0.87])
    def test_bloch_vector_shrinks_to_minus_r(self, r):
        rho = run_program(prepare_mixed_state(r))
        reduced = partial_trace(rho, keep=2)
        bloch_x = np.trace(reduced.matrix @ _SIGMA_X).real
        assert bloch_x == pytest.approx(-r, abs=1e-9)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="purity"):
            prepare_mixed_state(-0.1)


class TestCircuit:
    def test_structure(self):
        circuit = geometric_phase_circuit(math.radians(240))
        kinds = [inst.kind for inst in circuit.instructions]
        assert kinds[0] == GateKind.H
        assert kinds.count(GateKind.CZ) == 2
        assert len(kinds) == 5

    def test_rotation_angles_follow_quarter_omega(self):
        omega = math.radians(240)
        theta = omega / 4
        circuit = geometric_phase_circuit(omega)
        angles = [
            inst.angle for inst in circuit.instructions if inst.kind == GateKind.RX
        ]
        assert angles[0] == pytest.approx(-theta)
        assert angles[1] == pytest.approx(2 * theta - math.pi)

    def test_omega_range(self):
        with pytest.raises(ValueError, match="solid angle"):
            geometric_phase_circuit(2 * math.pi)

    def _calibrated_eigenstate_phase(self, q2_prep_angle, omega):
        # Eigenstate inputs; phase measured against the zero-area run.
        def run(o):
            steps = (ry(2, q2_prep_angle),) + geometric_phase_circuit(o).instructions
            return extract_ancilla_phase(run_program(steps))

        raw = run(omega)
        reference = run(0.0)
        wrapped = math.fmod(raw - reference + math.pi, 2 * math.pi)
        if wrapped <= 0:
            wrapped += 2 * math.pi
        return wrapped - math.pi

    def test_minus_eigenstate_gains_minus_half_omega(self):
        omega = math.radians(240)
        gamma = self._calibrated_eigenstate_phase(-math.pi / 2, omega)
        assert gamma == pytest.approx(-omega / 2, abs=1e-9)

    def test_plus_eigenstate_gains_plus_half_omega(self):
        omega = math.radians(240)
        gamma = self._calibrated_eigenstate_phase(math.pi / 2, omega)
        assert gamma == pytest.approx(omega / 2, abs=1e-9)


class TestPhaseExtraction:
    def test_reference_direction_is_zero(self):
        rho = run_program((h(1),))
        assert extract_ancilla_phase(rho) == pytest.approx(0.0, abs=1e-12)
        assert ancilla_visibility(rho) == pytest.approx(1.0)

    def test_quarter_turn(self):
        ket = np.kron(np.array([1, np.exp(-1j * math.pi / 2)]) / np.sqrt(2), [1, 0])
        rho = DensityMatrix.from_ket(ket)
        assert extract_ancilla_phase(rho) == pytest.approx(-math.pi / 2)

    def test_mixed_ancilla_rejected(self):
        with pytest.raises(ValueError, match="visibility"):
            extract_ancilla_phase(DensityMatrix.maximally_mixed())


class TestRunPoint:
    def test_ideal_matches_theory(self):
        run = run_geometric_point(math.radians(240), 0.97)
        assert run.gamma_mean == pytest.approx(
            gamma_theory(0.97, math.radians(240)), abs=math.radians(1)
        )
        assert run.gamma_std < 1e-9

    def test_phi_bookkeeping(self):
        omega = math.radians(240)
        run = run_geometric_point(omega, 0.5)
        theta = omega / 4
        assert run.theta == pytest.approx(theta)
        assert run.phi1 == pytest.approx(math.pi / 2 - theta)
        assert run.phi2 == pytest.approx(2 * theta - math.pi / 2)

    def test_phi_invariant_enforced(self):
        run = run_geometric_point(math.radians(180), 0.5)
        with pytest.raises(ValueError, match="phi1"):
            GeometricPhaseRun(
                omega=run.omega,
                r=run.r,
                theta=run.theta,
                phi1=run.phi1 + 0.1,
                phi2=run.phi2,
                repetitions=run.repetitions,
                measured_gamma=run.measured_gamma,
                gamma_mean=run.gamma_mean,
                gamma_std=run.gamma_std,
                measured_visibility=run.measured_visibility,
                visibility_mean=run.visibility_mean,
                mode=run.mode,
            )

    def test_repetition_validation(self):
        with pytest.raises(ValueError, match="repetitions"):
            run_geometric_point(math.pi, 0.5, repetitions=0)

    def test_measurement_noise_is_seeded(self):
        a = run_geometric_point(math.pi, 0.5, sigma=0.02, seed=4)
        b = run_geometric_point(math.pi, 0.5, sigma=0.02, seed=4)
        c = run_geometric_point(math.pi, 0.5, sigma=0.02, seed=5)
        assert a.measured_gamma == b.measured_gamma
        assert a.measured_gamma != c.measured_gamma
        assert a.gamma_std > 0

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError, match="sigma"):
            run_geometric_point(math.pi, 0.5, sigma=-0.1)


class TestSweep:
    def test_ideal_sweep_tracks_theory_tightly(self):
        runs = run_geometric_sweep()
        assert len(runs) == len(DEFAULT_SOLID_ANGLES) * len(DEFAULT_PURITIES)
        for run in runs:
            error = abs(run.gamma_mean - gamma_theory(run.r, run.omega))
            assert math.degrees(error) < 0.5
            assert run.gamma_std < 1e-9

    def test_half_turn_column_is_constant(self):
        runs = run_geometric_sweep(omegas=(math.pi,))
        for run in runs:
            assert math.degrees(run.gamma_mean) == pytest.approx(-90.0, abs=0.5)

    def test_gate_noise_sweep_preserves_trend(self):
        runs = run_geometric_sweep(mode=SimulationMode.GATE_NOISE)
        for run in runs:
            error = abs(run.gamma_mean - gamma_theory(run.r, run.omega))
            assert math.degrees(error) < 10.0
        omega = math.radians(240)
        column = [run.gamma_mean for run in runs if run.omega == pytest.approx(omega)]
        assert column == sorted(column)

    def test_gate_noise_visibility_relation(self):
        runs = run_geometric_sweep(mode="gate-noise")
        for run in runs:
            assert abs(
                run.visibility_mean - visibility_theory(run.r, run.omega)
            ) < 5e-2

    def test_empty_purity_list(self):
        assert run_geometric_sweep(purities=()) == []


@settings(max_examples=25, deadline=None)
@given(
    r=st.floats(min_value=0.05, max_value=1.0),
    omega=st.floats(min_value=0.2, max_value=2 * math.pi - 0.2),
)
def test_ideal_interferometer_matches_formula_everywhere(r, omega):
    run = run_geometric_point(omega, r, repetitions=1)
    assert run.gamma_mean == pytest.approx(gamma_theory(r, omega), abs=1e-6)
    assert run.visibility_mean == pytest.approx(visibility_theory(r, omega), abs=1e-6)
