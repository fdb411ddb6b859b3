"""Interferometric measurement of mixed-state geometric phase.

An ancilla spin prepared along +x conditionally drags the second spin
around a cone on the Bloch sphere. The ancilla coherence then carries
the weighted average of the phases acquired by the two path
eigenstates: visibility nu and phase gamma with
nu e^{i gamma} = cos(Omega/2) - i r sin(Omega/2), where Omega is the
solid angle of the cone and r the length of the mixed state's Bloch
vector. The conditional loop is built from two CZ gates around an x
rotation; that construction contributes a constant pi to the ancilla
phase and the gate noise damps its coherence, so every measurement is
calibrated against a zero-area reference run with the same structure,
which removes both artifacts. The sign convention is fixed by the pure
state case landing at -Omega/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DeviceConfig, NoiseSpec
from .core import DensityMatrix, expectation, on_qubit_1, two_qubit_pauli
from .engine import DephaseStep, ProgramStep, SimulationMode, run_program
from .gates import Circuit, cz, h, rx, ry

DEFAULT_PURITIES = (0.26, 0.50, 0.71, 0.87, 0.97)
DEFAULT_SOLID_ANGLES = (math.pi, 4 * math.pi / 3)
DEFAULT_REPETITIONS = 5

_MIN_VISIBILITY = 1e-6


def gamma_theory(r: float, omega: float) -> float:
    """Phase of cos(Omega/2) - i r sin(Omega/2), in (-pi, pi]."""
    if not 0 <= r <= 1:
        raise ValueError(f"purity must lie in [0, 1], got {r}")
    half = omega / 2.0
    return math.atan2(-r * math.sin(half), math.cos(half))


def visibility_theory(r: float, omega: float) -> float:
    """Magnitude of cos(Omega/2) - i r sin(Omega/2)."""
    if not 0 <= r <= 1:
        raise ValueError(f"purity must lie in [0, 1], got {r}")
    half = omega / 2.0
    return math.hypot(math.cos(half), r * math.sin(half))


def prepare_mixed_state(r: float) -> tuple[ProgramStep, ...]:
    """Steps putting spin 2 into (I - r sigma_x)/2.

    A rotation sets the longitudinal component to r, a dephasing wait
    destroys the transverse remainder, and a final rotation turns the
    shortened Bloch vector onto -x.
    """
    if not 0 <= r <= 1:
        raise ValueError(f"purity must lie in [0, 1], got {r}")
    return (
        rx(2, math.acos(r)),
        DephaseStep(2),
        ry(2, -math.pi / 2),
    )


def geometric_phase_circuit(omega: float) -> Circuit:
    """Ancilla-conditioned cone traversal of solid angle omega.

    The conditional loop R(omega) acts on spin 2 only when the ancilla
    is |1>: two CZ gates around x rotations of angles -theta and
    2 theta - pi with theta = omega/4. Eigenstates of the loop pick up
    phases of magnitude omega/2 with opposite signs, on top of the
    constant offset the CZ construction adds (removed downstream by the
    zero-area reference).
    """
    if not 0 <= omega < 2 * math.pi:
        raise ValueError(f"solid angle must lie in [0, 2 pi), got {omega}")
    theta = omega / 4.0
    return Circuit(
        instructions=(
            h(1),
            rx(2, -theta),
            cz(),
            rx(2, 2 * theta - math.pi),
            cz(),
        ),
        name=f"geometric-{math.degrees(omega):.0f}deg",
    )


def ancilla_transverse(rho: DensityMatrix) -> tuple[float, float]:
    """Expectations of sigma_x and sigma_y on the ancilla spin."""
    x = expectation(rho, two_qubit_pauli("x0"))
    y = expectation(rho, two_qubit_pauli("y0"))
    return x, y


def extract_ancilla_phase(rho: DensityMatrix) -> float:
    """Phase of the ancilla coherence, zero along the +x preparation."""
    x, y = ancilla_transverse(rho)
    if math.hypot(x, y) < _MIN_VISIBILITY:
        raise ValueError(
            "ancilla visibility below threshold; phase is undefined"
        )
    return math.atan2(y, x)


def ancilla_visibility(rho: DensityMatrix) -> float:
    x, y = ancilla_transverse(rho)
    return math.hypot(x, y)


def _wrap_angle(angle: float) -> float:
    """Fold into (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, 2 * math.pi)
    if wrapped <= 0:
        wrapped += 2 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class GeometricPhaseRun:
    """One sweep point: repeated interferometer runs at fixed (omega, r)."""

    omega: float
    r: float
    theta: float
    phi1: float
    phi2: float
    repetitions: int
    measured_gamma: tuple[float, ...]
    gamma_mean: float
    gamma_std: float
    measured_visibility: tuple[float, ...]
    visibility_mean: float
    mode: SimulationMode

    def __post_init__(self) -> None:
        theta = self.omega / 4.0
        if abs(self.theta - theta) > 1e-12:
            raise ValueError("stored theta disagrees with omega/4")
        if abs(self.phi1 - (math.pi / 2 - theta)) > 1e-12:
            raise ValueError("stored phi1 disagrees with pi/2 - theta")
        if abs(self.phi2 - (2 * theta - math.pi / 2)) > 1e-12:
            raise ValueError("stored phi2 disagrees with 2 theta - pi/2")
        if len(self.measured_gamma) != self.repetitions:
            raise ValueError("one measured phase required per repetition")


def _interferometer_state(
    r: float,
    omega: float,
    mode: SimulationMode,
    spec: NoiseSpec | None,
    config: DeviceConfig | None,
) -> DensityMatrix:
    steps = prepare_mixed_state(r) + geometric_phase_circuit(omega).instructions
    return run_program(steps, mode=mode, spec=spec, config=config)


def _noisy_phase_and_visibility(
    rho: DensityMatrix, sigma: float, rng: np.random.Generator | None
) -> tuple[float, float]:
    x, y = ancilla_transverse(rho)
    if sigma > 0 and rng is not None:
        x += rng.normal(0.0, sigma)
        y += rng.normal(0.0, sigma)
    nu = math.hypot(x, y)
    if nu < _MIN_VISIBILITY:
        raise ValueError(
            "ancilla visibility below threshold; phase is undefined"
        )
    return math.atan2(y, x), nu


def run_geometric_point(
    omega: float,
    r: float,
    repetitions: int = DEFAULT_REPETITIONS,
    mode: SimulationMode | str = SimulationMode.IDEAL,
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
    sigma: float = 0.0,
    seed: int | None = None,
) -> GeometricPhaseRun:
    """Measure gamma at one (omega, r), calibrated per repetition.

    Each repetition evaluates the interferometer and a zero-area
    reference with the same gate structure; the reported phase is the
    difference and the visibility the ratio, cancelling the constant
    construction offset and the noise-induced coherence loss. sigma
    adds Gaussian measurement noise to the transverse expectations.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be at least 1, got {repetitions}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    used_mode = SimulationMode(mode)
    rng = np.random.default_rng(seed) if sigma > 0 else None
    raw_state = _interferometer_state(r, omega, used_mode, spec, config)
    # Two calibration runs. The zero-area loop shares the gate structure
    # and pins the phase origin. The pure-state loop at the same solid
    # angle has unit ideal visibility and suffers the same per-branch
    # coherence damping, so dividing by it isolates the mixedness
    # contribution to the contrast.
    zero_area_state = _interferometer_state(r, 0.0, used_mode, spec, config)
    pure_state = _interferometer_state(1.0, omega, used_mode, spec, config)

    gammas = []
    visibilities = []
    for _ in range(repetitions):
        raw_gamma, raw_nu = _noisy_phase_and_visibility(raw_state, sigma, rng)
        ref_gamma, _ = _noisy_phase_and_visibility(zero_area_state, sigma, rng)
        _, pure_nu = _noisy_phase_and_visibility(pure_state, sigma, rng)
        gammas.append(_wrap_angle(raw_gamma - ref_gamma))
        visibilities.append(raw_nu / pure_nu)

    mean = math.atan2(
        sum(math.sin(g) for g in gammas), sum(math.cos(g) for g in gammas)
    )
    std = math.sqrt(
        sum(_wrap_angle(g - mean) ** 2 for g in gammas) / len(gammas)
    )
    theta = omega / 4.0
    return GeometricPhaseRun(
        omega=omega,
        r=r,
        theta=theta,
        phi1=math.pi / 2 - theta,
        phi2=2 * theta - math.pi / 2,
        repetitions=repetitions,
        measured_gamma=tuple(gammas),
        gamma_mean=mean,
        gamma_std=std,
        measured_visibility=tuple(visibilities),
        visibility_mean=float(np.mean(visibilities)),
        mode=used_mode,
    )


def run_geometric_sweep(
    omegas: tuple[float, ...] = DEFAULT_SOLID_ANGLES,
    purities: tuple[float, ...] = DEFAULT_PURITIES,
    repetitions: int = DEFAULT_REPETITIONS,
    mode: SimulationMode | str = SimulationMode.IDEAL,
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
    sigma: float = 0.0,
    seed: int | None = None,
) -> list[GeometricPhaseRun]:
    """Full phase-versus-purity table, one run per grid point."""
    runs = []
    for index, omega in enumerate(omegas):
        for jndex, r in enumerate(purities):
            point_seed = None if seed is None else seed + 1000 * index + jndex
            runs.append(
                run_geometric_point(
                    omega,
                    r,
                    repetitions=repetitions,
                    mode=mode,
                    spec=spec,
                    config=config,
                    sigma=sigma,
                    seed=point_seed,
                )
            )
    return runs
