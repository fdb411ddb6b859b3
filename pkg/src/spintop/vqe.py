"""Variational ground-state search for the two-spin Heisenberg model.

The cost Hamiltonian XX + YY + ZZ has eigenvalues {-3, 1, 1, 1} with
the singlet as ground state. A four-parameter real-amplitude ansatz
(two y rotations, a CNOT, two more y rotations) reaches the singlet
exactly. Gradients come from the parameter-shift rule and the
parameters follow plain gradient descent. Device modes reconstruct the
prepared state tomographically before taking the energy; two
mitigation paths are available, inversion of the CNOT relaxation
channel on the reconstructed state and confusion-matrix inversion of
sampled readout distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .config import DeviceConfig, NoiseSpec
from .core import DensityMatrix, apply_unitary, expectation, two_qubit_pauli
from .engine import SimulationMode, run_circuit
from .gates import Circuit, cx, gate_unitary, rx, ry
from .mitigation import mitigate_counts, mitigate_state
from .noise import DEFAULT_NOISE, two_spin_relaxation
from .tomography import (
    BASIS_STRINGS,
    ConfusionMatrix,
    counts_to_distribution,
    measure_coefficients,
    reconstruct,
    sample_readout,
)

DEFAULT_INITIAL_THETA = tuple(
    math.radians(deg) for deg in (10.2, 8.35, 108.0, 91.5)
)
DEFAULT_LEARNING_RATE = 0.25
DEFAULT_MAX_ITERATIONS = 100
DEFAULT_CONVERGENCE_TOL = 1e-4
DEFAULT_REM_SHOTS = 8192
DEFAULT_REM_CONFUSION = (0.02, 0.04)

_CONVERGENCE_STREAK = 3
_ENERGY_INCREASE_TOL = 1e-9


class Mitigation(str, Enum):
    NONE = "none"
    CEM = "cem"
    REM = "rem"


@dataclass(frozen=True)
class HeisenbergHamiltonian:
    """XX + YY + ZZ exchange coupling."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        eigenvalues = np.sort(np.linalg.eigvalsh(self.matrix))
        if np.abs(eigenvalues - np.array([-3.0, 1.0, 1.0, 1.0])).max() > 1e-10:
            raise ValueError(
                f"exchange Hamiltonian must have spectrum (-3, 1, 1, 1), "
                f"got {eigenvalues}"
            )

    @classmethod
    def standard(cls) -> "HeisenbergHamiltonian":
        matrix = (
            two_qubit_pauli("xx") + two_qubit_pauli("yy") + two_qubit_pauli("zz")
        )
        return cls(matrix=matrix)

    def ground_energy(self) -> float:
        return -3.0


_HAMILTONIAN = HeisenbergHamiltonian.standard()


def heisenberg_hamiltonian() -> HeisenbergHamiltonian:
    return _HAMILTONIAN


def ansatz_circuit(theta: Sequence[float]) -> Circuit:
    """Two y-rotation layers around a single CNOT."""
    values = [float(t) for t in theta]
    if len(values) != 4 or not all(math.isfinite(t) for t in values):
        raise ValueError(f"theta must be 4 finite angles, got {theta}")
    return Circuit(
        instructions=(
            ry(1, values[0]),
            ry(2, values[1]),
            cx(),
            ry(1, values[2]),
            ry(2, values[3]),
        ),
        name="heisenberg-ansatz",
    )


def _cnot_noise_channel(spec: NoiseSpec):
    return two_spin_relaxation(spec.t_2q_s, spec)


_BASIS_ROTATIONS = {
    "zz": (),
    "xx": (ry(1, math.pi / 2), ry(2, math.pi / 2)),
    "yy": (rx(1, math.pi / 2), rx(2, math.pi / 2)),
}

_PARITY = np.array([1.0, -1.0, -1.0, 1.0])


def _sampled_energy(
    rho: DensityMatrix,
    shots: int,
    confusion: ConfusionMatrix,
    seed: int | None,
    mitigated: bool,
) -> float:
    """Energy from three basis-rotated projective measurements.

    Each Hamiltonian term is estimated as the parity expectation of the
    sampled string distribution after rotating that term onto zz. The
    rotations are applied exactly; readout error enters through the
    confusion matrix and, when mitigated, leaves through its inverse.
    """
    energy = 0.0
    for offset, (term, rotations) in enumerate(_BASIS_ROTATIONS.items()):
        rotated = rho
        for inst in rotations:
            rotated = apply_unitary(rotated, gate_unitary(inst))
        term_seed = None if seed is None else seed + offset
        counts = sample_readout(rotated, shots, confusion, term_seed)
        if mitigated:
            distribution = mitigate_counts(counts, confusion).mitigated
        else:
            distribution = counts_to_distribution(counts)
        energy += float(np.dot(_PARITY, distribution))
    return energy


def vqe_energy(
    theta: Sequence[float],
    mode: SimulationMode | str = SimulationMode.IDEAL,
    mitigation: Mitigation | str = Mitigation.NONE,
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
    rem_shots: int = DEFAULT_REM_SHOTS,
    rem_confusion: ConfusionMatrix | None = None,
    seed: int | None = None,
) -> float:
    """Expectation of the exchange Hamiltonian after the ansatz.

    Ideal mode evaluates the exact state. Device modes run the noisy
    circuit and reconstruct the state tomographically first. CEM then
    inverts the CNOT-slot relaxation channel on the reconstruction; REM
    instead estimates the energy from sampled readout through a
    confusion matrix and inverts that matrix on the distributions.
    """
    used_mode = SimulationMode(mode)
    used_mitigation = Mitigation(mitigation)
    used_spec = spec if spec is not None else DEFAULT_NOISE
    rho = run_circuit(ansatz_circuit(theta), mode=used_mode, spec=used_spec, config=config)
    hamiltonian = _HAMILTONIAN.matrix

    if used_mitigation is Mitigation.REM:
        confusion = (
            rem_confusion
            if rem_confusion is not None
            else ConfusionMatrix.from_qubit_errors(*DEFAULT_REM_CONFUSION)
        )
        return _sampled_energy(rho, rem_shots, confusion, seed, mitigated=True)

    if used_mode is SimulationMode.IDEAL:
        state = rho
    else:
        state = reconstruct(measure_coefficients(rho, config=config)).state

    if used_mitigation is Mitigation.CEM:
        state = mitigate_state(state, _cnot_noise_channel(used_spec)).mitigated
    return expectation(state, hamiltonian)


def parameter_shift(
    func: Callable[[np.ndarray], float], theta: Sequence[float], index: int
) -> float:
    """Exact derivative of a pi-periodic rotation cost along one angle."""
    values = np.array([float(t) for t in theta])
    if not 0 <= index < len(values):
        raise ValueError(f"index {index} out of range for {len(values)} angles")
    shift = np.zeros_like(values)
    shift[index] = math.pi / 2
    return (func(values + shift) - func(values - shift)) / 2.0


def parameter_shift_gradient(
    theta: Sequence[float],
    mode: SimulationMode | str = SimulationMode.IDEAL,
    mitigation: Mitigation | str = Mitigation.NONE,
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
    rem_shots: int = DEFAULT_REM_SHOTS,
    rem_confusion: ConfusionMatrix | None = None,
    seed: int | None = None,
) -> np.ndarray:
    """All four shift-rule derivatives: eight energy evaluations."""

    def cost(values: np.ndarray) -> float:
        return vqe_energy(
            values,
            mode=mode,
            mitigation=mitigation,
            spec=spec,
            config=config,
            rem_shots=rem_shots,
            rem_confusion=rem_confusion,
            seed=seed,
        )

    return np.array([parameter_shift(cost, theta, i) for i in range(4)])


@dataclass(frozen=True)
class VqeIteration:
    """State of the optimizer after one descent step."""

    theta: tuple[float, float, float, float]
    energy: float
    energy_raw: float
    gradient: tuple[float, float, float, float]
    learning_rate: float

    def __post_init__(self) -> None:
        if len(self.theta) != 4 or len(self.gradient) != 4:
            raise ValueError("theta and gradient must have 4 components")
        if not math.isfinite(self.energy) or not math.isfinite(self.energy_raw):
            raise ValueError("iteration energies must be finite")


@dataclass(frozen=True)
class VqeRun:
    """Full descent trajectory and its configuration."""

    initial_theta: tuple[float, float, float, float]
    learning_rate: float
    iterations: tuple[VqeIteration, ...]
    mode: SimulationMode
    mitigation: Mitigation
    converged: bool
    final_learning_rate: float
    learning_rate_halved: bool

    @property
    def theta(self) -> tuple[float, float, float, float]:
        if not self.iterations:
            return self.initial_theta
        return self.iterations[-1].theta

    @property
    def final_energy(self) -> float:
        if not self.iterations:
            raise ValueError("run has no iterations")
        return self.iterations[-1].energy


class VqeOptimizer:
    """Steppable gradient descent on the ansatz energy.

    One step() call performs one gradient evaluation and one candidate
    move. The learning rate may be changed between steps and takes
    effect at the next one; each logged iteration records the rate it
    used. run_vqe drives this to completion; the task runner steps it
    so pause and rate changes land on iteration boundaries.
    """

    def __init__(
        self,
        initial_theta: Sequence[float] = DEFAULT_INITIAL_THETA,
        learning_rate: float = DEFAULT_LEARNING_RATE,
        mode: SimulationMode | str = SimulationMode.IDEAL,
        mitigation: Mitigation | str = Mitigation.NONE,
        convergence_tol: float = DEFAULT_CONVERGENCE_TOL,
        spec: NoiseSpec | None = None,
        config: DeviceConfig | None = None,
        rem_shots: int = DEFAULT_REM_SHOTS,
        rem_confusion: ConfusionMatrix | None = None,
        seed: int | None = None,
    ) -> None:
        self.mode = SimulationMode(mode)
        self.mitigation = Mitigation(mitigation)
        if learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {learning_rate}")
        theta = np.array([float(t) for t in initial_theta])
        if theta.shape != (4,) or not np.all(np.isfinite(theta)):
            raise ValueError(
                f"initial theta must be 4 finite angles, got {initial_theta}"
            )
        self.initial_theta = tuple(float(t) for t in theta)
        self.initial_learning_rate = float(learning_rate)
        self.learning_rate = float(learning_rate)
        self.convergence_tol = float(convergence_tol)
        self.learning_rate_halved = False
        self.iterations: list[VqeIteration] = []
        self._theta = theta
        self._spec = spec
        self._config = config
        self._rem_shots = rem_shots
        self._rem_confusion = rem_confusion
        self._seed = seed
        self._streak = 0
        self._previous_energy = self._objective(theta)
        if not math.isfinite(self._previous_energy):
            raise RuntimeError(f"energy diverged at initial theta {theta.tolist()}")

    def _objective(self, values: Sequence[float]) -> float:
        return vqe_energy(
            values,
            mode=self.mode,
            mitigation=self.mitigation,
            spec=self._spec,
            config=self._config,
            rem_shots=self._rem_shots,
            rem_confusion=self._rem_confusion,
            seed=self._seed,
        )

    def _raw_energy(self, values: Sequence[float]) -> float:
        if self.mitigation is Mitigation.NONE:
            return math.nan  # filled from the objective by step()
        return vqe_energy(
            values, mode=self.mode, mitigation=Mitigation.NONE,
            spec=self._spec, config=self._config,
        )

    @property
    def theta(self) -> tuple[float, float, float, float]:
        current = tuple(float(t) for t in self._theta)
        return current  # type: ignore[return-value]

    @property
    def converged(self) -> bool:
        return self._streak >= _CONVERGENCE_STREAK

    def step(self) -> VqeIteration | None:
        """Attempt one descent move.

        Returns the logged iteration, or None when the move raised the
        energy and was rejected with the learning rate halved.
        """
        gradient = parameter_shift_gradient(
            self._theta,
            mode=self.mode,
            mitigation=self.mitigation,
            spec=self._spec,
            config=self._config,
            rem_shots=self._rem_shots,
            rem_confusion=self._rem_confusion,
            seed=self._seed,
        )
        candidate = self._theta - self.learning_rate * gradient
        energy = self._objective(candidate)
        if not math.isfinite(energy):
            raise RuntimeError(
                f"energy diverged at theta {candidate.tolist()} "
                f"after {len(self.iterations)} iterations"
            )
        if energy > self._previous_energy + _ENERGY_INCREASE_TOL:
            self.learning_rate /= 2.0
            self.learning_rate_halved = True
            return None
        self._theta = candidate
        raw = self._raw_energy(candidate)
        if math.isnan(raw):
            raw = energy
        iteration = VqeIteration(
            theta=tuple(float(t) for t in candidate),
            energy=float(energy),
            energy_raw=float(raw),
            gradient=tuple(float(g) for g in gradient),
            learning_rate=self.learning_rate,
        )
        self.iterations.append(iteration)
        if abs(energy - self._previous_energy) < self.convergence_tol:
            self._streak += 1
        else:
            self._streak = 0
        self._previous_energy = energy
        return iteration

    def snapshot(self) -> VqeRun:
        return VqeRun(
            initial_theta=self.initial_theta,
            learning_rate=self.initial_learning_rate,
            iterations=tuple(self.iterations),
            mode=self.mode,
            mitigation=self.mitigation,
            converged=self.converged,
            final_learning_rate=self.learning_rate,
            learning_rate_halved=self.learning_rate_halved,
        )


def run_vqe(
    initial_theta: Sequence[float] = DEFAULT_INITIAL_THETA,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    mode: SimulationMode | str = SimulationMode.IDEAL,
    mitigation: Mitigation | str = Mitigation.NONE,
    convergence_tol: float = DEFAULT_CONVERGENCE_TOL,
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
    rem_shots: int = DEFAULT_REM_SHOTS,
    rem_confusion: ConfusionMatrix | None = None,
    seed: int | None = None,
) -> VqeRun:
    """Gradient descent on the ansatz energy.

    Stops once the energy change stays below convergence_tol for three
    consecutive iterations, or at max_iterations. The objective driving
    the descent includes the requested mitigation; the unmitigated
    energy is logged alongside. A step that raises the objective is
    rejected and the learning rate halved, which plain descent on this
    landscape should never need; the run records if it happened.
    """
    if max_iterations < 1:
        raise ValueError(f"max_iterations must be at least 1, got {max_iterations}")
    optimizer = VqeOptimizer(
        initial_theta=initial_theta,
        learning_rate=learning_rate,
        mode=mode,
        mitigation=mitigation,
        convergence_tol=convergence_tol,
        spec=spec,
        config=config,
        rem_shots=rem_shots,
        rem_confusion=rem_confusion,
        seed=seed,
    )
    for _ in range(max_iterations):
        optimizer.step()
        if optimizer.converged:
            break
    return optimizer.snapshot()


def replay_with_modes(
    run: VqeRun,
    modes: Sequence[SimulationMode | str] = (
        SimulationMode.IDEAL,
        SimulationMode.GATE_NOISE,
    ),
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
) -> dict[str, list[float]]:
    """Re-evaluate a run's recorded angles under other regimes.

    Useful after a noisy optimization: the angles it found, replayed
    ideally, show how close the variational state itself came to the
    ground state despite the biased energies.
    """
    if not run.iterations:
        raise ValueError("run has no iterations to replay")
    table: dict[str, list[float]] = {}
    for mode in modes:
        used = SimulationMode(mode)
        table[used.value] = [
            vqe_energy(iteration.theta, mode=used, spec=spec, config=config)
            for iteration in run.iterations
        ]
    return table
