"""Emulator of a two-spin NMR desktop quantum computer.

The package models a fixed pair of heteronuclear spin-1/2 nuclei (a proton
and a phosphorus nucleus in the same molecule) as a two-qubit register:
density-matrix states, a pulse-compiled gate set, thermal-relaxation noise,
pseudo-pure-state preparation, observable-based state tomography, error
mitigation, and two packaged experiments (mixed-state geometric phase and a
two-spin Heisenberg VQE). A small task service exposes the same pipeline
over a CLI and an HTTP API.
"""

from spintop.core import (
    DensityMatrix,
    KrausChannel,
    apply_channel,
    apply_unitary,
    expectation,
    fidelity,
    pauli_basis_coefficients,
)
from spintop.config import DeviceConfig, NoiseSpec
from spintop.engine import SimulationMode, run_circuit, run_program
from spintop.gates import (
    Circuit,
    GateInstruction,
    GateKind,
    circuit_from_json,
    circuit_to_json,
    circuit_unitary,
    gate_unitary,
)
from spintop.geometric import GeometricPhaseRun, run_geometric_point, run_geometric_sweep
from spintop.mitigation import MitigationReport, mitigate_counts, mitigate_state
from spintop.noise import noisy_gate_channel, single_spin_relaxation, two_spin_relaxation
from spintop.pps import PpsResult, prepare_pps, tune_pps
from spintop.pulses import compile_to_pulses, schedule_unitary, verify_compilation
from spintop.tomography import (
    ConfusionMatrix,
    TomographyScheme,
    default_scheme,
    measure_coefficients,
    reconstruct,
    sample_readout,
)
from spintop.vqe import (
    Mitigation,
    VqeIteration,
    VqeOptimizer,
    VqeRun,
    ansatz_circuit,
    heisenberg_hamiltonian,
    parameter_shift_gradient,
    run_vqe,
    vqe_energy,
)

__all__ = [
    "Circuit",
    "ConfusionMatrix",
    "DensityMatrix",
    "DeviceConfig",
    "GateInstruction",
    "GateKind",
    "GeometricPhaseRun",
    "KrausChannel",
    "Mitigation",
    "MitigationReport",
    "NoiseSpec",
    "PpsResult",
    "SimulationMode",
    "TomographyScheme",
    "VqeIteration",
    "VqeOptimizer",
    "VqeRun",
    "ansatz_circuit",
    "apply_channel",
    "apply_unitary",
    "circuit_from_json",
    "circuit_to_json",
    "circuit_unitary",
    "compile_to_pulses",
    "default_scheme",
    "expectation",
    "fidelity",
    "gate_unitary",
    "heisenberg_hamiltonian",
    "measure_coefficients",
    "mitigate_counts",
    "mitigate_state",
    "noisy_gate_channel",
    "parameter_shift_gradient",
    "pauli_basis_coefficients",
    "prepare_pps",
    "reconstruct",
    "run_circuit",
    "run_geometric_point",
    "run_geometric_sweep",
    "run_program",
    "run_vqe",
    "sample_readout",
    "schedule_unitary",
    "single_spin_relaxation",
    "tune_pps",
    "two_spin_relaxation",
    "verify_compilation",
    "vqe_energy",
]
