"""Hamiltonians of the dephasing-coupled qubit and its disordered Heisenberg ring.

The environment is an isotropic nearest-neighbour Heisenberg ring (exchange
coupling fixed to 1, which sets the energy unit) in a random on-site z field
drawn uniformly from [-h, h].  Spin operators are S = sigma/2; the qubit
couples through the bare Pauli sum ``sum_l sigma_y^(l)``.  Single-site
operators act as the standard Pauli matrices on the computational bit basis
(index 0 first), so e.g. the single-site coupling matrix is [[0, -i], [i, 0]].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .basis import build_sector_basis

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

SECTOR = "sector"
ENV_FULL = "env_full"
SYSTEM_ENV = "system_env"


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of the random on-site fields, reproducible from its seed."""

    h: float
    fields: np.ndarray
    seed: int

    @property
    def L(self) -> int:
        return int(self.fields.size)


def draw_fields(L: int, h: float, seed: int) -> DisorderRealization:
    """Draw L on-site fields uniformly from [-h, h].

    Uses PCG64, consuming exactly L values in site order, so realizations are
    bit-reproducible across machines and worker counts.
    """
    if h < 0:
        raise ValueError(f"disorder strength must be >= 0, got h={h}")
    if L < 1:
        raise ValueError(f"need L >= 1, got L={L}")
    rng = np.random.Generator(np.random.PCG64(seed))
    fields = rng.uniform(-h, h, size=L)
    return DisorderRealization(h=float(h), fields=fields, seed=int(seed))


@dataclass(frozen=True)
class OperatorMatrix:
    """Hermitian operator tagged with the space it lives in.

    ``space`` is one of "sector" (dimension C(L, n_up), dense), "env_full"
    (dimension 2^L, sparse) or "system_env" (dimension 2^(L+1), sparse).
    """

    matrix: np.ndarray | sparse.spmatrix
    space: str
    L: int
    n_up: int | None = None

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def nnz(self) -> int:
        if sparse.issparse(self.matrix):
            return int(self.matrix.nnz)
        return int(np.count_nonzero(self.matrix))

    def toarray(self) -> np.ndarray:
        if sparse.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix)


def _site_bits(configs: np.ndarray, L: int) -> np.ndarray:
    """(D, L) array of bits; column k is the occupation of site k+1."""
    return (configs[:, None] >> np.arange(L)) & 1


def _heisenberg_diagonal(bits: np.ndarray, fields: np.ndarray) -> np.ndarray:
    """Ising part plus field term: sum_k z_k z_{k+1} + sum_k h_k z_k, z = b - 1/2."""
    z = bits - 0.5
    return (z * np.roll(z, -1, axis=1)).sum(axis=1) + z @ fields


def build_env_hamiltonian(
    L: int, realization: DisorderRealization, n_up: int | None = None
) -> OperatorMatrix:
    """Heisenberg ring with random z fields; periodic boundary conditions.

    ``n_up`` selects the magnetization sector (dense block, exact because the
    total S^z is conserved); ``None`` builds the full 2^L sparse operator.
    """
    if L < 3:
        raise ValueError(f"periodic chain needs L >= 3, got L={L}")
    if realization.fields.shape != (L,):
        raise ValueError(
            f"realization has {realization.fields.size} fields, chain has {L} sites"
        )
    fields = realization.fields

    if n_up is not None:
        basis = build_sector_basis(L, n_up)
        configs = basis.configs
        bits = _site_bits(configs, L)
        D = basis.dim
        H = np.zeros((D, D))
        np.fill_diagonal(H, _heisenberg_diagonal(bits, fields))
        for k in range(L):
            k2 = (k + 1) % L
            src = np.nonzero(bits[:, k] != bits[:, k2])[0]
            flipped = configs[src] ^ ((1 << k) | (1 << k2))
            dst = np.searchsorted(configs, flipped)
            H[dst, src] = 0.5
        return OperatorMatrix(matrix=H, space=SECTOR, L=L, n_up=n_up)

    dim = 1 << L
    configs = np.arange(dim, dtype=np.int64)
    bits = _site_bits(configs, L)
    rows = [configs]
    cols = [configs]
    data = [_heisenberg_diagonal(bits, fields)]
    for k in range(L):
        k2 = (k + 1) % L
        src = np.nonzero(bits[:, k] != bits[:, k2])[0]
        rows.append(src ^ ((1 << k) | (1 << k2)))
        cols.append(src)
        data.append(np.full(src.size, 0.5))
    H = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()
    return OperatorMatrix(matrix=H, space=ENV_FULL, L=L)


def build_hse(L: int) -> OperatorMatrix:
    """Environment half of the dephasing coupling: sum over sites of sigma_y.

    Purely imaginary antisymmetric entries; eigenvalues {L, L-2, ..., -L}.
    """
    if L < 1:
        raise ValueError(f"need L >= 1, got L={L}")
    dim = 1 << L
    configs = np.arange(dim, dtype=np.int64)
    rows = []
    cols = []
    data = []
    for k in range(L):
        bit = 1 << k
        rows.append(configs ^ bit)
        cols.append(configs)
        # sigma_y sends |0> to i|1> and |1> to -i|0>
        data.append(np.where((configs & bit) == 0, 1.0j, -1.0j))
    H = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()
    return OperatorMatrix(matrix=H, space=ENV_FULL, L=L)


def build_total_hamiltonian(
    L: int, realization: DisorderRealization, lam: float
) -> OperatorMatrix:
    """Full qubit+environment generator sigma_z x H_SE + lam * (1 x H_E).

    Basis index is a*2^L + c with qubit state a as the most significant bit;
    a=0 is the sigma_z = +1 eigenstate, so the two diagonal blocks are
    lam*H_E + H_SE and lam*H_E - H_SE.
    """
    if lam < 0:
        raise ValueError(f"coupling must be >= 0, got lam={lam}")
    env = build_env_hamiltonian(L, realization).matrix
    hse = build_hse(L).matrix
    sz = sparse.diags([1.0, -1.0])
    H = sparse.kron(sz, hse, format="csr") + lam * sparse.kron(
        sparse.identity(2), env, format="csr"
    )
    return OperatorMatrix(matrix=H, space=SYSTEM_ENV, L=L)


def total_sz(L: int) -> sparse.csr_matrix:
    """Total S^z of the chain in the full 2^L space (diagonal)."""
    configs = np.arange(1 << L, dtype=np.int64)
    z = np.bitwise_count(configs) - L / 2
    return sparse.diags(z.astype(float)).tocsr()
