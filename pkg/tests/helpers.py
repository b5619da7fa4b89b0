"""Brute-force oracles shared by the unit and acceptance tests.

Everything here goes through the explicit (2^(L+1))-dimensional global state
and density matrix, independently of the branch-based production code.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np
from scipy.linalg import expm

from darwinmbl.basis import build_sector_basis, default_sector, embed_full
from darwinmbl.operators import build_env_hamiltonian, build_total_hamiltonian, draw_fields
from darwinmbl.spectral import diagonalize, select_eigenstate


def entropy(eigs: np.ndarray) -> float:
    p = eigs.real
    p = p[p > 1e-12]
    return float(-(p * np.log(p)).sum()) if p.size else 0.0


def prepare_initial_state(L, h, seed, eps):
    """|+x> on the qubit times the targeted sector eigenstate, full space."""
    n_up = default_sector(L)
    basis = build_sector_basis(L, n_up)
    realization = draw_fields(L, h, seed)
    spectrum = diagonalize(build_env_hamiltonian(L, realization, n_up=n_up))
    xi = embed_full(select_eigenstate(spectrum, eps).state, basis)
    plus_x = np.array([1.0, 1.0]) / np.sqrt(2)
    return np.kron(plus_x, xi).astype(complex), realization


def evolve_dense(psi0, L, realization, lam, t):
    """Dense matrix exponential of the full qubit+environment generator."""
    H = build_total_hamiltonian(L, realization, lam).toarray()
    return expm(-1j * t * H) @ psi0


def partial_trace(rho: np.ndarray, keep_axes, n_qubits: int) -> np.ndarray:
    """Trace a 2^n x 2^n density matrix down to the kept axes (MSB order)."""
    keep_axes = sorted(keep_axes)
    tensor = rho.reshape((2,) * (2 * n_qubits))
    for axis in sorted(set(range(n_qubits)) - set(keep_axes), reverse=True):
        tensor = np.trace(tensor, axis1=axis, axis2=axis + tensor.ndim // 2)
    dim = 1 << len(keep_axes)
    return tensor.reshape(dim, dim)


def axes_for_fragment(L, sites, include_system=True):
    """Tensor axes (MSB first) of the qubit and the given environment sites."""
    axes = [0] if include_system else []
    axes += [L + 1 - s for s in sites]
    return axes


def brute_force_rho_sf(psi: np.ndarray, L: int, sites) -> np.ndarray:
    rho = np.outer(psi, psi.conj())
    return partial_trace(rho, axes_for_fragment(L, sites), L + 1)


def _mi_from_rho(rho: np.ndarray, L: int, sites) -> float:
    rho_sf = partial_trace(rho, axes_for_fragment(L, sites), L + 1)
    rho_s = partial_trace(rho, [0], L + 1)
    h_s = entropy(np.linalg.eigvalsh(rho_s))
    if not sites:
        return 0.0
    rho_f = partial_trace(rho, axes_for_fragment(L, sites, include_system=False), L + 1)
    h_f = entropy(np.linalg.eigvalsh(rho_f))
    h_sf = entropy(np.linalg.eigvalsh(rho_sf))
    return h_s + h_f - h_sf


def brute_force_mi(psi: np.ndarray, L: int, sites) -> float:
    return _mi_from_rho(np.outer(psi, psi.conj()), L, sites)


def brute_force_lr(psi: np.ndarray, L: int) -> float:
    rho = np.outer(psi, psi.conj())
    rho_s = partial_trace(rho, [0], L + 1)
    h_s = entropy(np.linalg.eigvalsh(rho_s))
    lr = 0.0
    for l in range(1, L):
        values = [
            _mi_from_rho(rho, L, sites)
            for sites in itertools.combinations(range(1, L + 1), l)
        ]
        lr += abs(h_s - float(np.mean(values))) / h_s
    return lr
