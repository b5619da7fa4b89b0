"""Fixed-magnetization bases for a chain of L spins-1/2.

Convention used everywhere in this package: site k (1-indexed) lives on bit
k-1 of the configuration integer, and bit value 1 means spin up
(S^z = +1/2).  Configurations inside a sector are enumerated in ascending
integer order, which pins the sector indexing for all other modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np


@dataclass(frozen=True)
class SectorBasis:
    """All L-bit configurations with exactly ``n_up`` set bits, ascending."""

    L: int
    n_up: int
    configs: np.ndarray  # int64, strictly increasing

    @property
    def dim(self) -> int:
        return int(self.configs.size)

    def index_of(self, config: int) -> int:
        """Ordinal of a configuration; exact inverse of ``configs[i]``."""
        i = int(np.searchsorted(self.configs, config))
        if i == self.dim or int(self.configs[i]) != int(config):
            raise ValueError(
                f"configuration {config:#0{self.L + 2}b} not in sector "
                f"(L={self.L}, n_up={self.n_up})"
            )
        return i

    def indices_of(self, configs: np.ndarray) -> np.ndarray:
        """Vectorized ``index_of``; every input must belong to the sector."""
        idx = np.searchsorted(self.configs, configs)
        if np.any(idx >= self.dim) or np.any(self.configs[idx] != configs):
            raise ValueError("configuration outside sector")
        return idx


def build_sector_basis(L: int, n_up: int) -> SectorBasis:
    """Enumerate the magnetization sector with ``n_up`` up spins on L sites."""
    if L < 2:
        raise ValueError(f"need L >= 2, got L={L}")
    if not 0 <= n_up <= L:
        raise ValueError(f"n_up={n_up} outside [0, {L}]")
    all_states = np.arange(1 << L, dtype=np.int64)
    configs = all_states[np.bitwise_count(all_states) == n_up]
    assert configs.size == comb(L, n_up)
    return SectorBasis(L=L, n_up=n_up, configs=configs)


def default_sector(L: int) -> int:
    """Number of up spins used in the simulations for a chain of L sites.

    Zero total magnetization for even chains; total S^z = +1/2 for odd ones.
    """
    return (L + 1) // 2


def embed_full(state: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Place a sector vector into the full 2^L space (an isometry).

    Component c of the output equals the sector amplitude when c is one of
    the sector configurations and zero otherwise.
    """
    state = np.asarray(state)
    if state.shape != (basis.dim,):
        raise ValueError(
            f"state has dimension {state.shape}, sector needs ({basis.dim},)"
        )
    full = np.zeros(1 << basis.L, dtype=state.dtype)
    full[basis.configs] = state
    return full


def project_sector(full_state: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Restrict a full-space vector to the sector components (embed_full inverse)."""
    full_state = np.asarray(full_state)
    if full_state.shape != (1 << basis.L,):
        raise ValueError(
            f"state has dimension {full_state.shape}, full space needs ({1 << basis.L},)"
        )
    return full_state[basis.configs]
