"""Sector diagonalization, eigenstate targeting and half-chain entanglement.

Eigenstates are addressed by their normalized energy
``(E - E_min) / (E_max - E_min)`` inside the sector spectrum of the same
disorder realization.  Entropies are in nats; spectral weights below 1e-12
contribute zero, which removes the 0*log(0) singularity deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SectorBasis, embed_full
from .operators import SECTOR, OperatorMatrix

DEFAULT_DIM_CAP = 3432
ENTROPY_CUTOFF = 1e-12


class DimensionCapError(ValueError):
    """Sector is larger than the configured dense-diagonalization cap."""


class DegenerateSpectrumWidthError(ValueError):
    """E_max - E_min is too small to define a normalized energy."""


@dataclass(frozen=True)
class SectorSpectrum:
    """Full eigendecomposition of a sector Hamiltonian, energies ascending."""

    energies: np.ndarray
    states: np.ndarray  # orthonormal eigenvectors as columns

    @property
    def dim(self) -> int:
        return int(self.energies.size)

    @property
    def e_min(self) -> float:
        return float(self.energies[0])

    @property
    def e_max(self) -> float:
        return float(self.energies[-1])


@dataclass(frozen=True)
class EigenstateSelection:
    epsilon_target: float
    chosen_index: int
    epsilon_achieved: float
    state: np.ndarray


def diagonalize(H: OperatorMatrix, max_dim: int = DEFAULT_DIM_CAP) -> SectorSpectrum:
    """Dense Hermitian eigendecomposition of a sector-restricted Hamiltonian."""
    if H.space != SECTOR:
        raise ValueError(f"expected a sector operator, got space={H.space!r}")
    if H.dim > max_dim:
        raise DimensionCapError(f"sector dimension {H.dim} exceeds cap {max_dim}")
    energies, states = np.linalg.eigh(np.asarray(H.matrix))
    return SectorSpectrum(energies=energies, states=states)


def select_eigenstate(spectrum: SectorSpectrum, epsilon: float) -> EigenstateSelection:
    """Pick the eigenstate whose normalized energy is closest to the target.

    Ties break toward the lower index (lower energy).
    """
    width = spectrum.e_max - spectrum.e_min
    if width < 1e-12:
        raise DegenerateSpectrumWidthError(
            f"spectrum width {width} too small for energy normalization"
        )
    normalized = (spectrum.energies - spectrum.e_min) / width
    idx = int(np.argmin(np.abs(normalized - epsilon)))
    return EigenstateSelection(
        epsilon_target=float(epsilon),
        chosen_index=idx,
        epsilon_achieved=float(normalized[idx]),
        state=spectrum.states[:, idx].copy(),
    )


def spectrum_entropy(weights: np.ndarray) -> float:
    """Von Neumann entropy (nats) of a probability/Schmidt-weight spectrum."""
    w = np.asarray(weights).real
    w = w[w > ENTROPY_CUTOFF]
    return float(-(w * np.log(w)).sum()) if w.size else 0.0


def bipartite_entropy(full_state: np.ndarray, n_left: int) -> float:
    """Entanglement entropy of sites {1..n_left} of a full-space pure state.

    Sites 1..n_left occupy the low bits of the index, so a single C-order
    reshape exposes the bipartition; the Schmidt weights come from an SVD,
    avoiding the 2^L x 2^L density matrix.
    """
    dim = full_state.size
    L = dim.bit_length() - 1
    if 1 << L != dim:
        raise ValueError(f"state dimension {dim} is not a power of two")
    if not 0 < n_left < L:
        raise ValueError(f"cut {n_left} outside the chain 1..{L - 1}")
    mat = full_state.reshape(1 << (L - n_left), 1 << n_left)
    s = np.linalg.svd(mat, compute_uv=False)
    return spectrum_entropy(s**2)


def halfchain_entropy(
    state: np.ndarray, basis: SectorBasis, cut: int | None = None
) -> float:
    """Half-chain entanglement entropy of a sector state, in nats.

    The chain is bipartitioned into sites {1..cut} versus the rest, with
    ``cut = L // 2`` by default (the canonical half cut; the floor applies
    for odd chains).
    """
    n_left = basis.L // 2 if cut is None else cut
    return bipartite_entropy(embed_full(state, basis), n_left)
