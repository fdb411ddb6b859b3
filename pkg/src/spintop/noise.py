"""Thermal-relaxation noise attached to gate execution.

Each gate is modeled as its ideal unitary followed by per-spin dephasing
and amplitude damping whose probabilities derive from the gate duration
and the NoiseSpec relaxation times:

    p_damping   = 1 - exp(-t/T1)
    p_dephasing = (1 - exp(-2 gamma)) / 2,  gamma = t/T2* - t/(2 T1)

Single-qubit gates are charged the single-qubit duration and leave the
idle spin untouched; controlled gates and free evolutions are charged the
two-qubit duration (or their own length) on both spins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spintop.config import DeviceConfig, NoiseSpec
from spintop.core import (
    IDENTITY_2,
    SIGMA_Z,
    KrausChannel,
    compose_channels,
    tensor_channels,
)
from spintop.gates import (
    DEFAULT_DEVICE_CONFIG,
    GateInstruction,
    GateKind,
    SINGLE_QUBIT_KINDS,
    gate_unitary,
)

DEFAULT_NOISE = NoiseSpec()


@dataclass(frozen=True)
class NoiseProbabilities:
    """Damping and dephasing probabilities for one gate duration."""

    p_damping: float
    p_dephasing: float


def amplitude_damping_kraus(p: float) -> KrausChannel:
    """Single-spin energy relaxation toward |0> with probability p."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"damping probability must lie in [0, 1], got {p}")
    k1 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - p)]], dtype=complex)
    k2 = np.array([[0.0, math.sqrt(p)], [0.0, 0.0]], dtype=complex)
    return KrausChannel((k1, k2), label=f"damp(p={p:.3g})")


def dephasing_kraus(p: float) -> KrausChannel:
    """Single-spin phase flip with probability p; scales coherences by 1-2p."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"dephasing probability must lie in [0, 1], got {p}")
    k1 = math.sqrt(1.0 - p) * IDENTITY_2
    k2 = math.sqrt(p) * SIGMA_Z
    return KrausChannel((k1, k2), label=f"dephase(p={p:.3g})")


def thermal_relaxation_probs(duration: float, spec: NoiseSpec | None = None) -> NoiseProbabilities:
    """Noise probabilities accumulated over `duration` seconds."""
    spec = spec or DEFAULT_NOISE
    if not (duration >= 0) or not math.isfinite(duration):
        raise ValueError(f"duration must be non-negative, got {duration}")
    p_damping = 1.0 - math.exp(-duration / spec.t1_s)
    gamma = duration / spec.t2_star_s - duration / (2.0 * spec.t1_s)
    if gamma < 0:
        raise ValueError(
            f"negative dephasing exponent {gamma:.3e}; t2_star exceeds 2*t1"
        )
    p_dephasing = (1.0 - math.exp(-2.0 * gamma)) / 2.0
    return NoiseProbabilities(p_damping, p_dephasing)


def single_spin_relaxation(duration: float, spec: NoiseSpec | None = None) -> KrausChannel:
    """Dephasing then amplitude damping on one spin for `duration`."""
    probs = thermal_relaxation_probs(duration, spec)
    return compose_channels(
        amplitude_damping_kraus(probs.p_damping),
        dephasing_kraus(probs.p_dephasing),
        label=f"relax(t={duration:.3g}s)",
    )


def two_spin_relaxation(duration: float, spec: NoiseSpec | None = None) -> KrausChannel:
    """Independent relaxation of both spins for `duration`."""
    one = single_spin_relaxation(duration, spec)
    return tensor_channels(one, one, label=f"relax2(t={duration:.3g}s)")


def _identity_channel() -> KrausChannel:
    return KrausChannel((IDENTITY_2,), label="id")


def noisy_gate_channel(
    inst: GateInstruction,
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
) -> KrausChannel:
    """Full channel of one gate: ideal unitary, then relaxation noise.

    Single-qubit gates relax only their target for the single-qubit gate
    duration; controlled gates relax both spins for the two-qubit
    duration; Delay relaxes both spins for its own length. The identity
    gate still occupies a single-qubit slot and is charged accordingly.
    """
    spec = spec or DEFAULT_NOISE
    config = config or DEFAULT_DEVICE_CONFIG
    if inst.kind in SINGLE_QUBIT_KINDS:
        relax = single_spin_relaxation(spec.t_1q_s, spec)
        noise = (
            tensor_channels(relax, _identity_channel())
            if inst.target == 1
            else tensor_channels(_identity_channel(), relax)
        )
    elif inst.kind is GateKind.DELAY:
        noise = two_spin_relaxation(float(inst.duration), spec)
    else:
        noise = two_spin_relaxation(spec.t_2q_s, spec)
    unitary_channel = KrausChannel((gate_unitary(inst, config),), label=inst.kind.value)
    return compose_channels(noise, unitary_channel, label=f"noisy {inst.kind.value}")


def average_gate_fidelity(channel: KrausChannel, target: np.ndarray) -> float:
    """Average fidelity of a channel against a target unitary.

    Uses the entanglement-fidelity identity F_avg = (d F_e + 1) / (d + 1)
    with F_e = sum_k |tr(U^dag E_k)|^2 / d^2.
    """
    d = channel.dim
    if target.shape != (d, d):
        raise ValueError("target unitary must match the channel dimension")
    f_e = sum(abs(np.trace(target.conj().T @ op)) ** 2 for op in channel.operators) / d**2
    return float((d * f_e + 1.0) / (d + 1.0))
