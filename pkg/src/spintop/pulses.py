"""Compilation of gate circuits to the machine's pulse vocabulary.

Every gate becomes a short schedule of resonant RF segments (per spin, with
a drive phase selecting the rotation axis and a duration selecting the
angle) and free evolutions under the scalar coupling. The J coupling stays
on during RF segments, which is the machine's real imperfection; a
hard-pulse evaluation mode turns it off so compiled schedules can be
checked exactly against the ideal circuit unitary.

Compilation identities (all modulo global phase):

    Rz(t)  =  Rx(90) Ry(t) Rx(-90)          played right to left
    H      =  X pulse after Ry(90)
    CZ     =  free(1/2J) after simultaneous Rx(-90), Ry(90), Rx(90)
              on both spins (each triple realizes Rz(-90))
    CX     =  H on spin 2 around CZ
    CY     =  Rz(90) / Rz(-90) wrap on spin 2 around CX
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from scipy.linalg import expm

from spintop.config import DeviceConfig
from spintop.core import SIGMA_X, SIGMA_Y, SIGMA_Z, on_qubit_1, on_qubit_2
from spintop.gates import (
    ANGLED_KINDS,
    Circuit,
    DEFAULT_DEVICE_CONFIG,
    GateInstruction,
    GateKind,
    circuit_unitary,
    free_evolution_unitary,
    gate_unitary,
)

RF = "rf"
FREE = "free"


@dataclass(frozen=True)
class PulseSegment:
    """One primitive: an RF drive on a single spin, or a free evolution.

    For RF segments the drive Hamiltonian on the target spin is
    (amplitude/2) (cos(phase) sigma_x + sin(phase) sigma_y); amplitude is
    fixed by the spin's calibrated 90-degree time and the rotation angle
    is amplitude * duration.
    """

    kind: Literal["rf", "free"]
    duration: float
    spin: int | None = None
    phase: float = 0.0
    amplitude: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in (RF, FREE):
            raise ValueError(f"segment kind must be 'rf' or 'free', got {self.kind!r}")
        if not (self.duration > 0) or not math.isfinite(self.duration):
            raise ValueError(f"segment duration must be positive, got {self.duration}")
        if self.kind == RF:
            if self.spin not in (1, 2):
                raise ValueError("rf segment needs spin 1 or 2")
            if not (self.amplitude > 0):
                raise ValueError("rf segment needs a positive amplitude")
        else:
            if self.spin is not None:
                raise ValueError("free segment takes no spin")


@dataclass(frozen=True)
class PulseStep:
    """Segments that start simultaneously: one free evolution, or RF on
    one or both spins. A two-spin step may have unequal durations; the
    shorter drive simply switches off first."""

    segments: tuple[PulseSegment, ...]

    def __post_init__(self) -> None:
        segments = tuple(self.segments)
        if not segments:
            raise ValueError("pulse step needs at least one segment")
        kinds = {s.kind for s in segments}
        if kinds == {FREE}:
            if len(segments) != 1:
                raise ValueError("free evolution step holds exactly one segment")
        elif kinds == {RF}:
            spins = [s.spin for s in segments]
            if len(set(spins)) != len(spins):
                raise ValueError("simultaneous rf segments must target distinct spins")
        else:
            raise ValueError("a step mixes rf and free segments")
        object.__setattr__(self, "segments", segments)

    @property
    def duration(self) -> float:
        return max(s.duration for s in self.segments)

    @property
    def is_free(self) -> bool:
        return self.segments[0].kind == FREE


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered pulse steps compiled from one circuit."""

    steps: tuple[PulseStep, ...]
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def total_duration(self) -> float:
        return sum(step.duration for step in self.steps)

    def rf_segment_count(self) -> int:
        return sum(1 for step in self.steps for s in step.segments if s.kind == RF)


@dataclass(frozen=True)
class CompilationReport:
    """Outcome of checking a compiled schedule against its circuit."""

    target_unitary: np.ndarray
    compiled_unitary: np.ndarray
    distance: float


def _rf(spin: int, phase: float, angle: float, config: DeviceConfig) -> PulseSegment:
    """RF segment rotating `spin` by `angle` (positive) about the in-plane
    axis selected by `phase`."""
    t90 = config.t90(spin)
    amplitude = (math.pi / 2.0) / t90
    duration = angle / amplitude
    return PulseSegment(RF, duration, spin=spin, phase=phase % (2.0 * math.pi), amplitude=amplitude)


def _rotation_steps(spin: int, axis_phase: float, angle: float, config: DeviceConfig) -> list[PulseStep]:
    """Steps for a single-spin rotation of signed `angle` about x (phase 0)
    or y (phase pi/2); negative angles flip the drive phase by pi."""
    if angle == 0.0:
        return []
    phase = axis_phase if angle > 0 else axis_phase + math.pi
    return [PulseStep((_rf(spin, phase, abs(angle), config),))]


def _rz_steps(spin: int, angle: float, config: DeviceConfig) -> list[PulseStep]:
    if angle == 0.0:
        return []
    steps = _rotation_steps(spin, 0.0, -math.pi / 2.0, config)
    steps += _rotation_steps(spin, math.pi / 2.0, angle, config)
    steps += _rotation_steps(spin, 0.0, math.pi / 2.0, config)
    return steps


def _simultaneous_pair(axis_phase: float, angle: float, config: DeviceConfig) -> PulseStep:
    phase = axis_phase if angle > 0 else axis_phase + math.pi
    return PulseStep((
        _rf(1, phase, abs(angle), config),
        _rf(2, phase, abs(angle), config),
    ))


def _cz_steps(config: DeviceConfig) -> list[PulseStep]:
    steps = [
        _simultaneous_pair(0.0, math.pi / 2.0, config),
        _simultaneous_pair(math.pi / 2.0, math.pi / 2.0, config),
        _simultaneous_pair(0.0, -math.pi / 2.0, config),
        PulseStep((PulseSegment(FREE, 1.0 / (2.0 * config.j_coupling_hz)),)),
    ]
    return steps


def _hadamard_steps(spin: int, config: DeviceConfig) -> list[PulseStep]:
    steps = _rotation_steps(spin, math.pi / 2.0, math.pi / 2.0, config)
    steps += _rotation_steps(spin, 0.0, math.pi, config)
    return steps


def _cx_steps(config: DeviceConfig) -> list[PulseStep]:
    return _hadamard_steps(2, config) + _cz_steps(config) + _hadamard_steps(2, config)


def instruction_steps(inst: GateInstruction, config: DeviceConfig) -> list[PulseStep]:
    """Pulse steps for one instruction, in playback order."""
    kind = inst.kind
    spin = inst.target
    if kind is GateKind.X90:
        return _rotation_steps(spin, 0.0, math.pi / 2.0, config)
    if kind is GateKind.Y90:
        return _rotation_steps(spin, math.pi / 2.0, math.pi / 2.0, config)
    if kind is GateKind.X:
        return _rotation_steps(spin, 0.0, math.pi, config)
    if kind is GateKind.Y:
        return _rotation_steps(spin, math.pi / 2.0, math.pi, config)
    if kind is GateKind.RX:
        return _rotation_steps(spin, 0.0, float(inst.angle), config)
    if kind is GateKind.RY:
        return _rotation_steps(spin, math.pi / 2.0, float(inst.angle), config)
    if kind is GateKind.RZ:
        return _rz_steps(spin, float(inst.angle), config)
    if kind is GateKind.Z:
        return _rz_steps(spin, math.pi, config)
    if kind is GateKind.Z90:
        return _rz_steps(spin, math.pi / 2.0, config)
    if kind is GateKind.H:
        return _hadamard_steps(spin, config)
    if kind is GateKind.I:
        return []
    if kind is GateKind.CZ:
        return _cz_steps(config)
    if kind is GateKind.CX:
        return _cx_steps(config)
    if kind is GateKind.CY:
        return (
            _rz_steps(2, -math.pi / 2.0, config)
            + _cx_steps(config)
            + _rz_steps(2, math.pi / 2.0, config)
        )
    if kind is GateKind.DELAY:
        return [PulseStep((PulseSegment(FREE, float(inst.duration)),))]
    raise ValueError(f"unhandled gate kind {kind}")  # pragma: no cover


def compile_to_pulses(circuit: Circuit, config: DeviceConfig | None = None) -> PulseSchedule:
    """Compile a circuit into the machine's pulse schedule."""
    config = config or DEFAULT_DEVICE_CONFIG
    steps: list[PulseStep] = []
    for inst in circuit.instructions:
        steps.extend(instruction_steps(inst, config))
    return PulseSchedule(tuple(steps), name=circuit.name)


_SPIN_EMBED = {1: on_qubit_1, 2: on_qubit_2}


def _coupling_hamiltonian(config: DeviceConfig) -> np.ndarray:
    return (math.pi / 2.0) * config.j_coupling_hz * np.kron(SIGMA_Z, SIGMA_Z)


def pulse_step_unitary(
    step: PulseStep, config: DeviceConfig | None = None, coupling_on: bool = True
) -> np.ndarray:
    """Integrate one step's Hamiltonian.

    Free evolutions always run under the coupling. For RF steps the
    coupling term is included unless coupling_on is False (the hard-pulse
    idealization); a two-spin step with unequal durations is integrated
    piecewise, the longer drive finishing alone.
    """
    config = config or DEFAULT_DEVICE_CONFIG
    if step.is_free:
        return free_evolution_unitary(step.segments[0].duration, config)
    h_coupling = _coupling_hamiltonian(config) if coupling_on else np.zeros((4, 4), dtype=complex)
    boundaries = sorted({s.duration for s in step.segments})
    u = np.eye(4, dtype=complex)
    start = 0.0
    for end in boundaries:
        h = h_coupling.copy()
        for seg in step.segments:
            if seg.duration > start + 1e-15:
                axis = math.cos(seg.phase) * SIGMA_X + math.sin(seg.phase) * SIGMA_Y
                h = h + _SPIN_EMBED[seg.spin]((seg.amplitude / 2.0) * axis)
        u = expm(-1j * h * (end - start)) @ u
        start = end
    return u


def schedule_unitary(
    schedule: PulseSchedule, config: DeviceConfig | None = None, coupling_on: bool = True
) -> np.ndarray:
    """Product of the step unitaries, earliest step applied first."""
    config = config or DEFAULT_DEVICE_CONFIG
    u = np.eye(4, dtype=complex)
    for step in schedule.steps:
        u = pulse_step_unitary(step, config, coupling_on=coupling_on) @ u
    return u


def phase_adjusted_distance(u: np.ndarray, v: np.ndarray) -> float:
    """min over global phase of the operator-norm difference ||u - e^{i a} v||."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError("operands must share a shape")

    def norm_at(angle: float) -> float:
        return float(np.linalg.norm(u - np.exp(1j * angle) * v, ord=2))

    candidates = list(np.linspace(-math.pi, math.pi, 361))
    overlap = np.trace(v.conj().T @ u)
    if abs(overlap) > 1e-12:
        candidates.append(float(np.angle(overlap)))
    best = min(candidates, key=norm_at)
    # golden-section polish around the best coarse candidate
    lo, hi = best - 0.02, best + 0.02
    for _ in range(40):
        m1 = lo + 0.381966 * (hi - lo)
        m2 = hi - 0.381966 * (hi - lo)
        if norm_at(m1) <= norm_at(m2):
            hi = m2
        else:
            lo = m1
    return min(norm_at(best), norm_at((lo + hi) / 2.0))


def verify_compilation(
    circuit: Circuit, config: DeviceConfig | None = None, coupling_on: bool = True
) -> CompilationReport:
    """Compare the compiled pulse product against the ideal circuit unitary."""
    config = config or DEFAULT_DEVICE_CONFIG
    target = circuit_unitary(circuit, config)
    compiled = schedule_unitary(compile_to_pulses(circuit, config), config, coupling_on=coupling_on)
    return CompilationReport(target, compiled, phase_adjusted_distance(compiled, target))
