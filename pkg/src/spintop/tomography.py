"""State tomography through single-spin NMR observables.

A spectrometer sees, per spin, only the four transverse product
operators: the spin's own x and y magnetization and their correlations
with the partner's z. Everything else must be rotated into view by a
readout pulse first. Six experiments, each a short readout circuit plus
one observed spin, recover all fifteen Pauli coefficients; the state is
then rebuilt from the coefficient vector, with a positivity projection
guarding against unphysical reconstructions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DeviceConfig, NoiseSpec
from .core import (
    COEFFICIENT_LABELS,
    DensityMatrix,
    KrausChannel,
    apply_channel,
    apply_unitary,
    coefficients_to_matrix,
    expectation,
    on_qubit_1,
    on_qubit_2,
    pauli_basis_coefficients,
    two_qubit_pauli,
)
from .gates import (
    DEFAULT_DEVICE_CONFIG,
    Circuit,
    circuit_unitary,
    ry,
    x90,
    y90,
)
from .noise import DEFAULT_NOISE, noisy_gate_channel

BASIS_STRINGS = ("00", "01", "10", "11")

_EXTRACTION_TOL = 1e-10

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def nmr_observables(spin: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four directly visible product operators of one spin.

    Spin 1 sees its own transverse magnetization and its correlation
    with the partner's longitudinal state: x0, xz, y0, yz. Spin 2 sees
    the mirrored set 0x, zx, 0y, zy.
    """
    if spin == 1:
        return (
            on_qubit_1(_SIGMA_X),
            np.kron(_SIGMA_X, _SIGMA_Z),
            on_qubit_1(_SIGMA_Y),
            np.kron(_SIGMA_Y, _SIGMA_Z),
        )
    if spin == 2:
        return (
            on_qubit_2(_SIGMA_X),
            np.kron(_SIGMA_Z, _SIGMA_X),
            on_qubit_2(_SIGMA_Y),
            np.kron(_SIGMA_Z, _SIGMA_Y),
        )
    raise ValueError(f"spin must be 1 or 2, got {spin}")


@dataclass(frozen=True)
class ReadoutExperiment:
    """One tomography run: a readout circuit and one observed spin.

    extraction has one row per yielded label; the row gives the linear
    combination of the spin's four observable expectations that equals
    that Pauli coefficient of the pre-readout state. Rows are solved
    numerically at construction and verified exactly.
    """

    readout_pulse: Circuit
    observed_spin: int
    yields: tuple[str, ...]
    extraction: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        if self.observed_spin not in (1, 2):
            raise ValueError(f"observed spin must be 1 or 2, got {self.observed_spin}")
        if not self.yields:
            raise ValueError("experiment must yield at least one coefficient")
        for label in self.yields:
            if label not in COEFFICIENT_LABELS:
                raise ValueError(f"unknown coefficient label {label!r}")
        matrix = np.asarray(self.extraction, dtype=float)
        if matrix.shape != (len(self.yields), 4):
            raise ValueError(
                f"extraction must be {len(self.yields)}x4, got {matrix.shape}"
            )
        object.__setattr__(self, "extraction", matrix)
        self._verify_extraction()

    def _verify_extraction(self) -> None:
        # Measuring O after the readout R equals measuring R+ O R before
        # it, so each extraction row must rebuild its Pauli exactly.
        unitary = circuit_unitary(self.readout_pulse)
        transformed = [
            unitary.conj().T @ obs @ unitary
            for obs in nmr_observables(self.observed_spin)
        ]
        for row, label in enumerate(self.yields):
            combined = sum(
                self.extraction[row, k] * transformed[k] for k in range(4)
            )
            if np.abs(combined - two_qubit_pauli(label)).max() > _EXTRACTION_TOL:
                raise ValueError(
                    f"extraction row for {label!r} does not reproduce its Pauli"
                )

    def observable_expectations(self, rho: DensityMatrix) -> np.ndarray:
        return np.array(
            [expectation(rho, obs) for obs in nmr_observables(self.observed_spin)]
        )


def _solve_extraction(
    readout_pulse: Circuit, observed_spin: int, yields: tuple[str, ...]
) -> np.ndarray:
    """Express each yielded Pauli in the readout-transformed observables."""
    unitary = circuit_unitary(readout_pulse)
    transformed = np.column_stack(
        [
            (unitary.conj().T @ obs @ unitary).reshape(-1)
            for obs in nmr_observables(observed_spin)
        ]
    )
    rows = []
    for label in yields:
        target = two_qubit_pauli(label).reshape(-1)
        solution, *_ = np.linalg.lstsq(transformed, target, rcond=None)
        rows.append(solution.real)
    return np.array(rows)


def _experiment(
    readout_pulse: Circuit, observed_spin: int, yields: tuple[str, ...]
) -> ReadoutExperiment:
    extraction = _solve_extraction(readout_pulse, observed_spin, yields)
    return ReadoutExperiment(
        readout_pulse=readout_pulse,
        observed_spin=observed_spin,
        yields=yields,
        extraction=extraction,
    )


@dataclass(frozen=True)
class TomographyScheme:
    """Six readout experiments jointly recovering all 15 coefficients."""

    experiments: tuple[ReadoutExperiment, ...]

    def __post_init__(self) -> None:
        seen: list[str] = []
        for experiment in self.experiments:
            seen.extend(experiment.yields)
        if sorted(seen) != sorted(COEFFICIENT_LABELS):
            missing = set(COEFFICIENT_LABELS) - set(seen)
            duplicated = {label for label in seen if seen.count(label) > 1}
            raise ValueError(
                f"incomplete coverage: missing {sorted(missing)}, "
                f"duplicated {sorted(duplicated)}"
            )
        if self._coverage_rank() != len(COEFFICIENT_LABELS):
            raise ValueError("coverage matrix is rank deficient")

    def _coverage_rank(self) -> int:
        # Row per recovered coefficient: the Pauli content actually read
        # out, as a vector over the 15 labels.
        rows = []
        for experiment in self.experiments:
            unitary = circuit_unitary(experiment.readout_pulse)
            transformed = [
                unitary.conj().T @ obs @ unitary
                for obs in nmr_observables(experiment.observed_spin)
            ]
            for row in range(len(experiment.yields)):
                combined = sum(
                    experiment.extraction[row, k] * transformed[k] for k in range(4)
                )
                rows.append(
                    [
                        np.trace(two_qubit_pauli(label) @ combined).real / 4
                        for label in COEFFICIENT_LABELS
                    ]
                )
        return int(np.linalg.matrix_rank(np.array(rows), tol=1e-8))


def default_scheme(config: DeviceConfig | None = None) -> TomographyScheme:
    """Six-experiment scheme built around the standard z-readout anchor.

    Two direct observations (one per spin) give the eight transverse
    coefficients. A y-rotation on each spin turns longitudinal order
    into visible magnetization: the spin-1 readout recovers z0 and zz,
    the spin-2 readout recovers 0z. Two more spin-2 rotations expose
    the double-transverse block through spin 1.
    """
    cfg = config if config is not None else DEFAULT_DEVICE_CONFIG
    del cfg  # readout pulses are calibration free in the unitary picture
    half_pi = np.pi / 2
    return TomographyScheme(
        experiments=(
            _experiment(Circuit((), name="direct-1"), 1, ("x0", "xz", "y0", "yz")),
            _experiment(Circuit((), name="direct-2"), 2, ("0x", "zx", "0y", "zy")),
            _experiment(Circuit((y90(1),), name="z-readout-1"), 1, ("z0", "zz")),
            _experiment(Circuit((y90(2),), name="z-readout-2"), 2, ("0z",)),
            _experiment(Circuit((x90(2),), name="xy-readout"), 1, ("xy", "yy")),
            _experiment(
                Circuit((ry(2, -half_pi),), name="xx-readout"), 1, ("xx", "yx")
            ),
        )
    )


def _apply_readout(
    rho: DensityMatrix,
    circuit: Circuit,
    noisy: bool,
    spec: NoiseSpec,
    config: DeviceConfig,
) -> DensityMatrix:
    if not noisy:
        return apply_unitary(rho, circuit_unitary(circuit, config))
    for inst in circuit.instructions:
        rho = apply_channel(rho, noisy_gate_channel(inst, spec, config))
    return rho


def measure_coefficients(
    rho: DensityMatrix,
    scheme: TomographyScheme | None = None,
    noisy: bool = False,
    spec: NoiseSpec | None = None,
    config: DeviceConfig | None = None,
    sigma: float = 0.0,
    seed: int | None = None,
) -> np.ndarray:
    """Run every experiment of the scheme and assemble the c vector.

    With noisy set, readout pulses evolve under the gate noise model.
    sigma adds independent Gaussian noise to each coefficient, standing
    in for spectral-fitting uncertainty; it defaults to off.
    """
    used_scheme = scheme if scheme is not None else default_scheme()
    used_spec = spec if spec is not None else DEFAULT_NOISE
    used_config = config if config is not None else DEFAULT_DEVICE_CONFIG
    coefficients = np.zeros(len(COEFFICIENT_LABELS))
    for experiment in used_scheme.experiments:
        rotated = _apply_readout(
            rho, experiment.readout_pulse, noisy, used_spec, used_config
        )
        values = experiment.extraction @ experiment.observable_expectations(rotated)
        for label, value in zip(experiment.yields, values):
            coefficients[COEFFICIENT_LABELS.index(label)] = value
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    if sigma > 0:
        rng = np.random.default_rng(seed)
        coefficients = coefficients + rng.normal(0.0, sigma, size=len(coefficients))
    return coefficients


@dataclass(frozen=True)
class ReconstructionResult:
    """Reconstructed state plus whether the positivity projection fired."""

    state: DensityMatrix
    projected: bool


def reconstruct(coefficients: np.ndarray) -> ReconstructionResult:
    """Rebuild the density matrix from a measured coefficient vector.

    The raw matrix I/4 + sum c P / 4 can pick up small negative
    eigenvalues from measurement noise; when it does, eigenvalues are
    clipped at zero and the trace renormalized, which is the nearest
    PSD trace-one matrix in Frobenius norm for small violations.
    """
    raw = coefficients_to_matrix(np.asarray(coefficients, dtype=float))
    hermitian = (raw + raw.conj().T) / 2
    eigenvalues, vectors = np.linalg.eigh(hermitian)
    if eigenvalues.min() >= -1e-12:
        return ReconstructionResult(state=DensityMatrix(hermitian), projected=False)
    clipped = np.clip(eigenvalues, 0.0, None)
    matrix = (vectors * clipped) @ vectors.conj().T
    matrix = matrix / np.trace(matrix).real
    return ReconstructionResult(state=DensityMatrix(matrix), projected=True)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Column-stochastic readout error map over the four basis strings.

    Entry [k, j] is the probability that a shot truly in string j is
    reported as string k.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (4, 4):
            raise ValueError(f"confusion matrix must be 4x4, got {matrix.shape}")
        if matrix.min() < 0:
            raise ValueError("confusion matrix entries must be nonnegative")
        column_sums = matrix.sum(axis=0)
        if np.abs(column_sums - 1.0).max() > 1e-12:
            raise ValueError(
                f"confusion matrix columns must sum to 1, got {column_sums}"
            )
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls) -> "ConfusionMatrix":
        return cls(np.eye(4))

    @classmethod
    def from_qubit_errors(cls, epsilon_1: float, epsilon_2: float) -> "ConfusionMatrix":
        """Independent symmetric bit flips on the two readout lines."""
        for name, eps in (("epsilon_1", epsilon_1), ("epsilon_2", epsilon_2)):
            if not 0 <= eps <= 0.5:
                raise ValueError(f"{name} must lie in [0, 1/2], got {eps}")
        flip_1 = np.array([[1 - epsilon_1, epsilon_1], [epsilon_1, 1 - epsilon_1]])
        flip_2 = np.array([[1 - epsilon_2, epsilon_2], [epsilon_2, 1 - epsilon_2]])
        return cls(np.kron(flip_1, flip_2))


def sample_readout(
    rho: DensityMatrix,
    shots: int,
    confusion: ConfusionMatrix | None = None,
    seed: int | None = None,
) -> dict[str, int]:
    """Projective measurement emulation with readout-line errors.

    Draws the shot outcomes multinomially from the populations, then
    corrupts each shot through the confusion matrix. Fixing the seed
    makes the counts bit-reproducible.
    """
    if shots < 1:
        raise ValueError(f"shots must be at least 1, got {shots}")
    used = confusion if confusion is not None else ConfusionMatrix.identity()
    rng = np.random.default_rng(seed)
    populations = np.clip(np.array(rho.populations()), 0.0, None)
    populations = populations / populations.sum()
    true_counts = rng.multinomial(shots, populations)
    observed = np.zeros(4, dtype=int)
    for j, count in enumerate(true_counts):
        if count:
            observed += rng.multinomial(count, used.matrix[:, j])
    return {label: int(n) for label, n in zip(BASIS_STRINGS, observed)}


def counts_to_distribution(counts: dict[str, int]) -> np.ndarray:
    """Normalize a counts dict into a probability vector over strings."""
    total = sum(counts.get(label, 0) for label in BASIS_STRINGS)
    if total <= 0:
        raise ValueError("counts must contain at least one shot")
    return np.array([counts.get(label, 0) / total for label in BASIS_STRINGS])
