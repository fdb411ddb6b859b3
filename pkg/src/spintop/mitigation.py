"""Error mitigation by inverting known noise maps.

Two schemes. State mitigation linearizes a Kraus channel into a
superoperator acting on the vectorized density matrix and applies its
inverse to the measured state; the result is generally not physical, so
it is Hermitized and projected back onto the density-matrix cone.
Counts mitigation multiplies a sampled readout distribution by the
inverse confusion matrix, clipping the quasi-probabilities that the
unphysical inverse can produce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, KrausChannel, apply_channel
from .tomography import BASIS_STRINGS, ConfusionMatrix, counts_to_distribution

_VERIFICATION_STATES = 20
_VERIFICATION_TOL = 1e-10
_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class Superoperator:
    """Matrix form of a channel acting on row-stacked density matrices."""

    matrix: np.ndarray
    dim: int
    convention: str = "row-stacking"

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.matrix))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        side = int(np.sqrt(self.dim))
        return (self.matrix @ rho.reshape(-1)).reshape(side, side)


def superoperator_from_kraus(channel: KrausChannel) -> Superoperator:
    """Build S with vec(sum E rho E+) = S vec(rho), row-stacking.

    Under row stacking vec(A rho B) = (A kron B^T) vec(rho), so each
    Kraus term contributes E kron conj(E). The construction is verified
    against direct Kraus application on random states, which pins the
    conjugation convention empirically.
    """
    side = channel.operators[0].shape[0]
    dim = side * side
    matrix = np.zeros((dim, dim), dtype=complex)
    for op in channel.operators:
        matrix += np.kron(op, op.conj())
    rng = np.random.default_rng(0)
    for _ in range(_VERIFICATION_STATES):
        ginibre = rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side))
        gram = ginibre @ ginibre.conj().T
        rho = DensityMatrix(gram / np.trace(gram).real)
        direct = apply_channel(rho, channel).matrix
        via_matrix = (matrix @ rho.matrix.reshape(-1)).reshape(side, side)
        if np.abs(direct - via_matrix).max() > _VERIFICATION_TOL:
            raise ValueError(
                "superoperator disagrees with direct Kraus application"
            )
    return Superoperator(matrix=matrix, dim=dim)


@dataclass(frozen=True)
class MitigationReport:
    """Raw and mitigated results plus inversion diagnostics."""

    raw: DensityMatrix | np.ndarray
    mitigated: DensityMatrix | np.ndarray
    conditioning: float
    projection_fired: bool


def mitigate_state(rho_f: DensityMatrix, channel: KrausChannel) -> MitigationReport:
    """Undo a known channel on a measured state by superoperator inverse.

    The inverse of a channel is not a channel, so the algebraic result
    can have negative eigenvalues; those are clipped and the trace
    renormalized, and the report says whether that projection fired.
    """
    superop = superoperator_from_kraus(channel)
    singular_values = np.linalg.svd(superop.matrix, compute_uv=False)
    if singular_values.min() < _SINGULAR_TOL:
        raise ValueError(
            "channel superoperator is singular and cannot be inverted"
        )
    side = rho_f.matrix.shape[0]
    recovered = np.linalg.solve(superop.matrix, rho_f.matrix.reshape(-1))
    recovered = recovered.reshape(side, side)
    hermitian = (recovered + recovered.conj().T) / 2
    eigenvalues, vectors = np.linalg.eigh(hermitian)
    if eigenvalues.min() >= -_SINGULAR_TOL:
        normalized = hermitian / np.trace(hermitian).real
        mitigated = DensityMatrix(normalized)
        fired = False
    else:
        clipped = np.clip(eigenvalues, 0.0, None)
        projected = (vectors * clipped) @ vectors.conj().T
        mitigated = DensityMatrix(projected / np.trace(projected).real)
        fired = True
    return MitigationReport(
        raw=rho_f,
        mitigated=mitigated,
        conditioning=superop.condition_number,
        projection_fired=fired,
    )


def mitigate_counts(
    counts: dict[str, int] | np.ndarray, confusion: ConfusionMatrix
) -> MitigationReport:
    """Invert the readout confusion matrix on a sampled distribution.

    Accepts either a counts dict over the four basis strings or an
    already normalized probability vector. The inverse can push entries
    below zero; they are clipped and the distribution renormalized.
    """
    if isinstance(counts, dict):
        distribution = counts_to_distribution(counts)
    else:
        distribution = np.asarray(counts, dtype=float)
        if distribution.shape != (len(BASIS_STRINGS),):
            raise ValueError(
                f"distribution must have {len(BASIS_STRINGS)} entries, "
                f"got shape {distribution.shape}"
            )
        if distribution.min() < 0 or abs(distribution.sum() - 1.0) > 1e-9:
            raise ValueError("distribution must be nonnegative and sum to 1")
    singular_values = np.linalg.svd(confusion.matrix, compute_uv=False)
    if singular_values.min() < _SINGULAR_TOL:
        raise ValueError("confusion matrix is singular and cannot be inverted")
    recovered = np.linalg.solve(confusion.matrix, distribution)
    fired = bool(recovered.min() < 0)
    clipped = np.clip(recovered, 0.0, None)
    total = clipped.sum()
    if total <= 0:
        raise ValueError("mitigated distribution vanished after clipping")
    return MitigationReport(
        raw=distribution,
        mitigated=clipped / total,
        conditioning=float(np.linalg.cond(confusion.matrix)),
        projection_fired=fired,
    )
