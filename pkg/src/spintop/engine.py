"""Circuit execution under three fidelity regimes.

ideal applies exact gate unitaries. gate-noise follows each gate with
the thermal-relaxation channel of its time slot. pulse compiles each
instruction to its RF schedule, integrates the drive with the coupling
always on, and charges both spins relaxation for the schedule's wall
time. Programs may also contain dephase steps, which in the first two
regimes zero a spin's transverse components exactly and in pulse mode
become a long free-evolution wait.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

from .config import DeviceConfig, NoiseSpec
from .core import (
    COEFFICIENT_LABELS,
    DensityMatrix,
    apply_channel,
    apply_unitary,
    coefficients_to_matrix,
    pauli_basis_coefficients,
)
from .gates import (
    DEFAULT_DEVICE_CONFIG,
    Circuit,
    GateInstruction,
    delay,
    gate_unitary,
)
from .noise import DEFAULT_NOISE, noisy_gate_channel, two_spin_relaxation
from .pulses import compile_to_pulses, schedule_unitary


class SimulationMode(str, Enum):
    IDEAL = "ideal"
    GATE_NOISE = "gate-noise"
    PULSE = "pulse"


# A dephasing wait must be a whole number of 4/J coupling periods so the
# zz phase winds back to the identity; 140/J is about 0.2 s, long
# against T2* and still short against T1.
DEPHASE_WAIT_PERIODS = 140


@dataclass(frozen=True)
class DephaseStep:
    """Program step that destroys one spin's transverse order."""

    spin: int

    def __post_init__(self) -> None:
        if self.spin not in (1, 2):
            raise ValueError(f"spin must be 1 or 2, got {self.spin}")


ProgramStep = Union[GateInstruction, DephaseStep]


def dephase_spin(rho: DensityMatrix, spin: int) -> DensityMatrix:
    """Zero every Pauli coefficient transverse on the given spin."""
    if spin not in (1, 2):
        raise ValueError(f"spin must be 1 or 2, got {spin}")
    coefficients = pauli_basis_coefficients(rho)
    for i, label in enumerate(COEFFICIENT_LABELS):
        if label[spin - 1] in ("x", "y"):
            coefficients[i] = 0.0
    return DensityMatrix(coefficients_to_matrix(coefficients))


def _run_gate(
    rho: DensityMatrix,
    inst: GateInstruction,
    mode: SimulationMode,
    spec: NoiseSpec,
    config: DeviceConfig,
) -> DensityMatrix:
    if mode is SimulationMode.IDEAL:
        return apply_unitary(rho, gate_unitary(inst, config))
    if mode is SimulationMode.GATE_NOISE:
        return apply_channel(rho, noisy_gate_channel(inst, spec, config))
    schedule = compile_to_pulses(Circuit((inst,)), config)
    rho = apply_unitary(rho, schedule_unitary(schedule, config))
    if schedule.total_duration > 0:
        rho = apply_channel(rho, two_spin_relaxation(schedule.total_duration, spec))
    return rho


def _run_dephase(
    rho: DensityMatrix,
    step: DephaseStep,
    mode: SimulationMode,
    spec: NoiseSpec,
    config: DeviceConfig,
) -> DensityMatrix:
    if mode is not SimulationMode.PULSE:
        return dephase_spin(rho, step.spin)
    wait = DEPHASE_WAIT_PERIODS / config.j_coupling_hz
    return _run_gate(rho, delay(wait), mode, spec, config)


def run_program(
    steps: Sequence[ProgramStep],
    initial: DensityMatrix | None = None,
    mode: SimulationMode | str = SimulationMode.IDEAL,
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
) -> DensityMatrix:
    """Execute a sequence of gates and dephase steps on a state."""
    used_mode = SimulationMode(mode)
    used_spec = spec if spec is not None else DEFAULT_NOISE
    used_config = config if config is not None else DEFAULT_DEVICE_CONFIG
    rho = initial if initial is not None else DensityMatrix.ground_state()
    for step in steps:
        if isinstance(step, DephaseStep):
            rho = _run_dephase(rho, step, used_mode, used_spec, used_config)
        elif isinstance(step, GateInstruction):
            rho = _run_gate(rho, step, used_mode, used_spec, used_config)
        else:
            raise TypeError(f"unsupported program step {type(step).__name__}")
    return rho


def run_circuit(
    circuit: Circuit,
    initial: DensityMatrix | None = None,
    mode: SimulationMode | str = SimulationMode.IDEAL,
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
) -> DensityMatrix:
    """Execute a plain gate circuit under the chosen regime."""
    return run_program(circuit.instructions, initial, mode, spec, config)
