"""Dense density-matrix primitives for a two-qubit register.

Basis ordering is fixed everywhere as |00>, |01>, |10>, |11> with qubit 1
(the proton spin) as the first tensor factor and qubit 2 (the phosphorus
spin) as the second. Operators are plain complex numpy arrays; states and
channels get thin frozen wrappers that validate their defining invariants
once at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Construction-time tolerances. States and channels are rejected outright
# when they violate these, rather than silently repaired.
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9
KRAUS_COMPLETENESS_TOL = 1e-10
UNITARY_TOL = 1e-8
IMAG_RESIDUE_TOL = 1e-9

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULIS = {"0": IDENTITY_2, "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

# Order of the fifteen traceless two-qubit Pauli coefficients, fixed for
# every consumer including the wire format. The first letter addresses
# qubit 1, the second addresses qubit 2, "0" standing for identity.
COEFFICIENT_LABELS = (
    "x0", "y0", "z0",
    "0x", "0y", "0z",
    "xx", "xy", "xz",
    "yx", "yy", "yz",
    "zx", "zy", "zz",
)


def two_qubit_pauli(label: str) -> np.ndarray:
    """Return the 4x4 Pauli product named by a two-letter label like "xz".

    The first letter acts on qubit 1, the second on qubit 2; "0" is the
    single-qubit identity, so "z0" is sigma_z on qubit 1 alone.
    """
    if len(label) != 2 or label[0] not in PAULIS or label[1] not in PAULIS:
        raise ValueError(f"unknown Pauli product label {label!r}")
    return np.kron(PAULIS[label[0]], PAULIS[label[1]])


def on_qubit_1(op: np.ndarray) -> np.ndarray:
    """Embed a single-qubit operator on the first tensor factor."""
    return np.kron(op, IDENTITY_2)


def on_qubit_2(op: np.ndarray) -> np.ndarray:
    """Embed a single-qubit operator on the second tensor factor."""
    return np.kron(IDENTITY_2, op)


def basis_ket(index: int, dim: int = 4) -> np.ndarray:
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def _as_square_complex(matrix: np.ndarray | Sequence[Sequence[complex]]) -> np.ndarray:
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated quantum state of one or two qubits.

    The wrapped array is checked once for Hermiticity (within 1e-10),
    unit trace (within 1e-10) and positive semidefiniteness (eigenvalues
    no lower than -1e-9), then frozen against accidental mutation.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_square_complex(self.matrix).copy()
        if arr.shape[0] not in (2, 4):
            raise ValueError(f"density matrix must be 2x2 or 4x4, got {arr.shape}")
        herm_err = np.abs(arr - arr.conj().T).max()
        if herm_err > HERMITIAN_TOL:
            raise ValueError(f"density matrix is not Hermitian (deviation {herm_err:.3e})")
        trace_err = abs(arr.trace() - 1.0)
        if trace_err > TRACE_TOL:
            raise ValueError(f"density matrix trace deviates from 1 by {trace_err:.3e}")
        eigenvalues = np.linalg.eigvalsh(arr)
        if eigenvalues.min() < EIGENVALUE_FLOOR:
            raise ValueError(
                f"density matrix has negative eigenvalue {eigenvalues.min():.3e}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, ket: np.ndarray | Sequence[complex]) -> "DensityMatrix":
        """Build the projector onto a (normalized) state vector."""
        vec = np.asarray(ket, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            raise ValueError("cannot normalize a zero state vector")
        vec = vec / norm
        return cls(np.outer(vec, vec.conj()))

    @classmethod
    def ground_state(cls, dim: int = 4) -> "DensityMatrix":
        return cls.from_ket(basis_ket(0, dim))

    @classmethod
    def maximally_mixed(cls, dim: int = 4) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    def populations(self) -> np.ndarray:
        """Diagonal of the state in the computational basis, as reals."""
        return self.matrix.diagonal().real.copy()


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A completely positive trace-preserving map given by Kraus operators.

    Completeness sum_k E_k^dag E_k = I is enforced within 1e-10 at
    construction.
    """

    operators: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self) -> None:
        if not self.operators:
            raise ValueError("Kraus channel needs at least one operator")
        ops = tuple(_as_square_complex(op).copy() for op in self.operators)
        dim = ops[0].shape[0]
        for op in ops:
            if op.shape[0] != dim:
                raise ValueError("Kraus operators must share one dimension")
            op.setflags(write=False)
        completeness = sum(op.conj().T @ op for op in ops)
        err = np.abs(completeness - np.eye(dim)).max()
        if err > KRAUS_COMPLETENESS_TOL:
            raise ValueError(
                f"Kraus operators violate completeness by {err:.3e} ({self.label or 'unlabeled'})"
            )
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]


def compose_channels(outer: KrausChannel, inner: KrausChannel, label: str = "") -> KrausChannel:
    """Channel applying `inner` first, then `outer` (operator products)."""
    if outer.dim != inner.dim:
        raise ValueError("cannot compose channels of different dimension")
    ops = tuple(a @ b for a in outer.operators for b in inner.operators)
    return KrausChannel(ops, label or f"{outer.label}*{inner.label}")


def tensor_channels(first: KrausChannel, second: KrausChannel, label: str = "") -> KrausChannel:
    """Independent product channel acting on qubit 1 with `first`, qubit 2 with `second`."""
    ops = tuple(np.kron(a, b) for a in first.operators for b in second.operators)
    return KrausChannel(ops, label or f"{first.label}(x){second.label}")


def _check_unitary(u: np.ndarray) -> np.ndarray:
    u = _as_square_complex(u)
    dev = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if dev > UNITARY_TOL:
        raise ValueError(f"operator is not unitary (deviation {dev:.3e})")
    return u


def apply_unitary(rho: DensityMatrix, u: np.ndarray) -> DensityMatrix:
    """Conjugate a state by a unitary, u rho u^dag."""
    u = _check_unitary(u)
    if u.shape[0] != rho.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, operator {u.shape[0]}")
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


def apply_channel(rho: DensityMatrix, channel: KrausChannel) -> DensityMatrix:
    """Apply a Kraus channel, sum_k E_k rho E_k^dag."""
    if channel.dim != rho.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, channel {channel.dim}")
    out = np.zeros_like(rho.matrix)
    for op in channel.operators:
        out = out + op @ rho.matrix @ op.conj().T
    return DensityMatrix(out)


def expectation(rho: DensityMatrix, observable: np.ndarray) -> float:
    """Expectation value tr(rho O) of a Hermitian observable."""
    obs = _as_square_complex(observable)
    if obs.shape[0] != rho.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, observable {obs.shape[0]}")
    herm_err = np.abs(obs - obs.conj().T).max()
    if herm_err > IMAG_RESIDUE_TOL:
        raise ValueError(f"observable is not Hermitian (deviation {herm_err:.3e})")
    value = np.trace(rho.matrix @ obs)
    if abs(value.imag) > IMAG_RESIDUE_TOL:
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian PSD matrix, clamping tiny negative modes."""
    eigenvalues, vectors = np.linalg.eigh(matrix)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    return (vectors * np.sqrt(eigenvalues)) @ vectors.conj().T


def fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Uhlmann fidelity of two states, in [0, 1] and 1 iff equal.

    Computed as (tr sqrt(sqrt(a) b sqrt(a)))^2 through Hermitian
    eigendecompositions with clamping of round-off-negative eigenvalues.
    """
    if a.dim != b.dim:
        raise ValueError("cannot compare states of different dimension")
    root_a = _psd_sqrt(a.matrix)
    inner = root_a @ b.matrix @ root_a
    inner = (inner + inner.conj().T) / 2.0
    value = float(np.trace(_psd_sqrt(inner)).real) ** 2
    return float(np.clip(value, 0.0, 1.0))


def pauli_basis_coefficients(rho: DensityMatrix) -> np.ndarray:
    """The fifteen real coefficients c_ij = tr(rho sigma_i sigma_j).

    Ordering follows COEFFICIENT_LABELS. Only defined for two-qubit
    states; the state is rho = I/4 + sum_ij c_ij sigma_i sigma_j / 4.
    """
    if rho.dim != 4:
        raise ValueError("Pauli coefficient decomposition needs a two-qubit state")
    coeffs = np.empty(len(COEFFICIENT_LABELS))
    for k, label in enumerate(COEFFICIENT_LABELS):
        coeffs[k] = expectation(rho, two_qubit_pauli(label))
    return coeffs


def coefficients_to_matrix(coefficients: np.ndarray | Sequence[float]) -> np.ndarray:
    """Reassemble I/4 + sum_ij c_ij sigma_i sigma_j / 4 from 15 coefficients.

    The result is Hermitian by construction but not necessarily positive;
    callers that need a valid state should project (see tomography).
    """
    coeffs = np.asarray(coefficients, dtype=float).reshape(-1)
    if coeffs.shape[0] != len(COEFFICIENT_LABELS):
        raise ValueError(f"expected {len(COEFFICIENT_LABELS)} coefficients, got {coeffs.shape[0]}")
    out = np.eye(4, dtype=complex) / 4.0
    for value, label in zip(coeffs, COEFFICIENT_LABELS):
        out = out + value * two_qubit_pauli(label) / 4.0
    return out


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Reduced single-qubit state of a two-qubit state, keeping qubit 1 or 2."""
    if rho.dim != 4:
        raise ValueError("partial trace needs a two-qubit state")
    if keep not in (1, 2):
        raise ValueError("keep must be qubit 1 or 2")
    tensor = rho.matrix.reshape(2, 2, 2, 2)
    if keep == 1:
        reduced = np.einsum("ikjk->ij", tensor)
    else:
        reduced = np.einsum("kikj->ij", tensor)
    return DensityMatrix(reduced)
