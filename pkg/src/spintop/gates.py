"""Gate set and circuit representation for the two-spin register.

The native set mirrors what the emulated machine can play: Pauli flips,
90-degree rotations, arbitrary-angle rotations about x/y/z, Hadamard,
identity, the three controlled gates with qubit 1 as control, and a free
J-coupling evolution of chosen duration ("Delay"). Circuits are ordered
instruction lists with a canonical JSON wire form used verbatim by the
store, the HTTP API and the composer UI.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from spintop.config import DeviceConfig
from spintop.core import IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z, on_qubit_1, on_qubit_2


class GateKind(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"
    X90 = "X90"
    Y90 = "Y90"
    Z90 = "Z90"
    RX = "Rx"
    RY = "Ry"
    RZ = "Rz"
    H = "H"
    I = "I"  # noqa: E741 - the gate really is called I
    CX = "CX"
    CY = "CY"
    CZ = "CZ"
    DELAY = "Delay"


SINGLE_QUBIT_KINDS = frozenset({
    GateKind.X, GateKind.Y, GateKind.Z,
    GateKind.X90, GateKind.Y90, GateKind.Z90,
    GateKind.RX, GateKind.RY, GateKind.RZ,
    GateKind.H, GateKind.I,
})
CONTROLLED_KINDS = frozenset({GateKind.CX, GateKind.CY, GateKind.CZ})
ANGLED_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})

DEFAULT_DEVICE_CONFIG = DeviceConfig()


@dataclass(frozen=True)
class GateInstruction:
    """One native gate with its per-kind parameters.

    target is required (1 or 2) exactly for single-qubit kinds, angle only
    for Rx/Ry/Rz (radians), duration only for Delay (seconds, positive).
    """

    kind: GateKind
    target: int | None = None
    angle: float | None = None
    duration: float | None = None

    def __post_init__(self) -> None:
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in SINGLE_QUBIT_KINDS:
            if self.target not in (1, 2):
                raise ValueError(f"gate {kind.value} needs target 1 or 2, got {self.target}")
        else:
            if self.target is not None:
                raise ValueError(f"gate {kind.value} takes no target")
        if kind in ANGLED_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"gate {kind.value} needs a finite angle in radians")
        elif self.angle is not None:
            raise ValueError(f"gate {kind.value} takes no angle")
        if kind is GateKind.DELAY:
            if self.duration is None or not (self.duration > 0) or not math.isfinite(self.duration):
                raise ValueError("Delay needs a positive finite duration in seconds")
        elif self.duration is not None:
            raise ValueError(f"gate {kind.value} takes no duration")


@dataclass(frozen=True)
class Circuit:
    """An ordered gate sequence; earlier instructions act first."""

    instructions: tuple[GateInstruction, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if not isinstance(self.name, str):
            raise ValueError("circuit name must be a string")

    def __len__(self) -> int:
        return len(self.instructions)


# ---------------------------------------------------------------------------
# Convenience constructors, mostly for tests and scripts.

def x(target: int) -> GateInstruction:
    return GateInstruction(GateKind.X, target=target)


def y(target: int) -> GateInstruction:
    return GateInstruction(GateKind.Y, target=target)


def z(target: int) -> GateInstruction:
    return GateInstruction(GateKind.Z, target=target)


def x90(target: int) -> GateInstruction:
    return GateInstruction(GateKind.X90, target=target)


def y90(target: int) -> GateInstruction:
    return GateInstruction(GateKind.Y90, target=target)


def z90(target: int) -> GateInstruction:
    return GateInstruction(GateKind.Z90, target=target)


def rx(target: int, angle: float) -> GateInstruction:
    return GateInstruction(GateKind.RX, target=target, angle=angle)


def ry(target: int, angle: float) -> GateInstruction:
    return GateInstruction(GateKind.RY, target=target, angle=angle)


def rz(target: int, angle: float) -> GateInstruction:
    return GateInstruction(GateKind.RZ, target=target, angle=angle)


def h(target: int) -> GateInstruction:
    return GateInstruction(GateKind.H, target=target)


def idle(target: int) -> GateInstruction:
    return GateInstruction(GateKind.I, target=target)


def cx() -> GateInstruction:
    return GateInstruction(GateKind.CX)


def cy() -> GateInstruction:
    return GateInstruction(GateKind.CY)


def cz() -> GateInstruction:
    return GateInstruction(GateKind.CZ)


def delay(duration: float) -> GateInstruction:
    return GateInstruction(GateKind.DELAY, duration=duration)


# ---------------------------------------------------------------------------
# JSON wire form. Canonical serialization is compact (no whitespace) with
# keys in the documented order; see README for the exact grammar.

def instruction_to_payload(inst: GateInstruction) -> dict[str, Any]:
    payload: dict[str, Any] = {"kind": inst.kind.value}
    if inst.target is not None:
        payload["target"] = inst.target
    if inst.angle is not None:
        payload["angle_rad"] = inst.angle
    if inst.duration is not None:
        payload["duration_s"] = inst.duration
    return payload


def circuit_to_payload(circuit: Circuit) -> dict[str, Any]:
    return {
        "name": circuit.name,
        "instructions": [instruction_to_payload(g) for g in circuit.instructions],
    }


def circuit_to_json(circuit: Circuit) -> str:
    return json.dumps(circuit_to_payload(circuit), separators=(",", ":"))


def instruction_from_payload(payload: Mapping[str, Any]) -> GateInstruction:
    if not isinstance(payload, Mapping):
        raise ValueError("instruction must be an object")
    allowed = {"kind", "target", "angle_rad", "duration_s"}
    unknown = set(payload) - allowed
    if unknown:
        raise ValueError(f"unknown instruction fields: {sorted(unknown)}")
    kind_raw = payload.get("kind")
    try:
        kind = GateKind(kind_raw)
    except ValueError:
        raise ValueError(f"unknown gate kind {kind_raw!r}") from None
    target = payload.get("target")
    if target is not None and (isinstance(target, bool) or not isinstance(target, int)):
        raise ValueError(f"instruction field 'target' must be an integer, got {target!r}")
    angle = payload.get("angle_rad")
    if angle is not None and (isinstance(angle, bool) or not isinstance(angle, (int, float))):
        raise ValueError("instruction field 'angle_rad' must be a number")
    duration = payload.get("duration_s")
    if duration is not None and (isinstance(duration, bool) or not isinstance(duration, (int, float))):
        raise ValueError("instruction field 'duration_s' must be a number")
    return GateInstruction(
        kind,
        target=target,
        angle=None if angle is None else float(angle),
        duration=None if duration is None else float(duration),
    )


def circuit_from_payload(payload: Mapping[str, Any]) -> Circuit:
    if not isinstance(payload, Mapping):
        raise ValueError("circuit must be an object")
    unknown = set(payload) - {"name", "instructions"}
    if unknown:
        raise ValueError(f"unknown circuit fields: {sorted(unknown)}")
    name = payload.get("name", "")
    if not isinstance(name, str):
        raise ValueError("circuit field 'name' must be a string")
    instructions_raw = payload.get("instructions")
    if not isinstance(instructions_raw, Sequence) or isinstance(instructions_raw, (str, bytes)):
        raise ValueError("circuit field 'instructions' must be a list")
    instructions = []
    for index, item in enumerate(instructions_raw):
        try:
            instructions.append(instruction_from_payload(item))
        except ValueError as exc:
            raise ValueError(f"instruction {index}: {exc}") from None
    return Circuit(tuple(instructions), name=name)


def circuit_from_json(text: str) -> Circuit:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid circuit JSON: {exc}") from None
    return circuit_from_payload(payload)


# ---------------------------------------------------------------------------
# Unitaries.

def rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    """Single-qubit rotation exp(-i angle sigma_axis / 2)."""
    return math.cos(angle / 2.0) * IDENTITY_2 - 1j * math.sin(angle / 2.0) * axis


_SQRT2 = math.sqrt(2.0)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2
CX_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CY_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, -1j], [0, 0, 1j, 0]], dtype=complex
)
CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(complex)


def free_evolution_unitary(duration: float, config: DeviceConfig) -> np.ndarray:
    """Unitary of the scalar-coupling Hamiltonian (pi/2) J sigma_z sigma_z."""
    alpha = (math.pi / 2.0) * config.j_coupling_hz * duration
    phase = np.exp(-1j * alpha * np.array([1.0, -1.0, -1.0, 1.0]))
    return np.diag(phase)


_FIXED_SINGLE = {
    GateKind.X: SIGMA_X,
    GateKind.Y: SIGMA_Y,
    GateKind.Z: SIGMA_Z,
    GateKind.X90: rotation(SIGMA_X, math.pi / 2.0),
    GateKind.Y90: rotation(SIGMA_Y, math.pi / 2.0),
    GateKind.Z90: rotation(SIGMA_Z, math.pi / 2.0),
    GateKind.H: HADAMARD,
    GateKind.I: IDENTITY_2,
}

_AXES = {GateKind.RX: SIGMA_X, GateKind.RY: SIGMA_Y, GateKind.RZ: SIGMA_Z}


def gate_unitary(inst: GateInstruction, config: DeviceConfig | None = None) -> np.ndarray:
    """The ideal 4x4 unitary of one instruction on the full register."""
    config = config or DEFAULT_DEVICE_CONFIG
    kind = inst.kind
    if kind in _FIXED_SINGLE:
        u2 = _FIXED_SINGLE[kind]
    elif kind in _AXES:
        u2 = rotation(_AXES[kind], float(inst.angle))
    elif kind is GateKind.CX:
        return CX_MATRIX.copy()
    elif kind is GateKind.CY:
        return CY_MATRIX.copy()
    elif kind is GateKind.CZ:
        return CZ_MATRIX.copy()
    elif kind is GateKind.DELAY:
        return free_evolution_unitary(float(inst.duration), config)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unhandled gate kind {kind}")
    return on_qubit_1(u2) if inst.target == 1 else on_qubit_2(u2)


def circuit_unitary(circuit: Circuit, config: DeviceConfig | None = None) -> np.ndarray:
    """Product of the instruction unitaries, earliest applied first."""
    u = np.eye(4, dtype=complex)
    for inst in circuit.instructions:
        u = gate_unitary(inst, config) @ u
    return u
