"""Reduced states, entropies, fragment-averaged mutual information, redundancy.

All fragment quantities descend from the two environment branches: reshaping
a branch so the fragment sites form the row index gives a 2^l x 2^(L-l)
matrix M, and every reduced density matrix of interest is built from the
cross-Gram blocks M_a M_b^dagger.  Because the global state is pure, the
nonzero spectrum of each reduced state can be taken from whichever Gram side
is smaller, which keeps every eigenproblem at dimension ~2^(L/2) instead of
2^l.  Fragments are site subsets without regard to contiguity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .dynamics import BranchState, decoherence_factor
from .spectral import ENTROPY_CUTOFF, spectrum_entropy

H_S_THRESHOLD = 1e-6
EXACT_ENUM_LIMIT = 4000
SAMPLE_CAP = 2000
_BATCH = 128


class DegenerateSystemEntropyError(ValueError):
    """System entropy too small for rescaled redundancy (e.g. at a revival)."""


class SampleCountError(ValueError):
    """More fragment samples requested than distinct fragments exist."""


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace reduced state of (qubit +) fragment sites."""

    matrix: np.ndarray
    fragment_sites: tuple[int, ...]
    includes_system: bool

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True)
class FragmentPolicy:
    """How fragment averages enumerate site subsets.

    "auto" enumerates exactly while C(L, l) <= exact_limit and falls back to
    uniform sampling without replacement capped at sample_cap; "exact" always
    enumerates; "sampled" always samples (capped at the population size).
    """

    mode: str = "auto"
    exact_limit: int = EXACT_ENUM_LIMIT
    sample_cap: int = SAMPLE_CAP

    def plan(self, L: int, size: int) -> tuple[str, int]:
        population = comb(L, size)
        if self.mode == "exact":
            return "exact", population
        if self.mode == "sampled":
            k = min(self.sample_cap, population)
            return ("exact", population) if k == population else ("sampled", k)
        if self.mode == "auto":
            if population <= self.exact_limit:
                return "exact", population
            return "sampled", min(self.sample_cap, population)
        raise ValueError(f"unknown fragment mode {self.mode!r}")


@dataclass(frozen=True)
class RedundancyCurve:
    """Fragment-averaged mutual information versus fragment size, one state."""

    L: int
    fragment_sizes: np.ndarray  # 1..L
    mi_mean: np.ndarray  # nats, index l-1
    mi_stderr: np.ndarray
    mi_rescaled: np.ndarray  # mi_mean / system_entropy
    system_entropy: float
    lack_of_redundancy: float
    sampling_meta: tuple[tuple[str, int], ...]  # (mode, count) per size


def _validate_sites(fragment_sites, L: int) -> tuple[int, ...]:
    sites = tuple(sorted(int(s) for s in fragment_sites))
    if len(set(sites)) != len(sites):
        raise ValueError(f"duplicate fragment sites in {fragment_sites}")
    if sites and (sites[0] < 1 or sites[-1] > L):
        raise ValueError(f"fragment sites {sites} outside chain 1..{L}")
    return sites


def fragment_split(phi: np.ndarray, L: int, sites: tuple[int, ...]) -> np.ndarray:
    """Reshape a full-space vector into (2^l, 2^(L-l)) with fragment rows.

    Row bits keep the package's site convention: the smallest fragment site is
    the least significant row bit; same for the complement columns.
    """
    complement = tuple(s for s in range(1, L + 1) if s not in sites)
    # axis a of the (2,)*L tensor holds site L - a
    order = [L - s for s in reversed(sites)] + [L - s for s in reversed(complement)]
    return (
        phi.reshape((2,) * L).transpose(order).reshape(1 << len(sites), -1)
    )


def _gram(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Batched A B^dagger over the trailing two axes (BLAS-backed)."""
    return np.matmul(A, B.conj().swapaxes(-1, -2))


def _gram_t(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Batched A^dagger B over the trailing two axes (BLAS-backed)."""
    return np.matmul(A.conj().swapaxes(-1, -2), B)


def _entropy_batch(weights: np.ndarray) -> np.ndarray:
    w = weights.real
    terms = np.where(w > ENTROPY_CUTOFF, w * np.log(np.where(w > 0, w, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def _fragment_entropy_pairs(
    phi_plus: np.ndarray, phi_minus: np.ndarray, L: int, combos: list[tuple[int, ...]]
) -> tuple[np.ndarray, np.ndarray]:
    """H_F and H_SF for a batch of equal-size fragments.

    Chooses per size whichever Gram side is smaller: for the joint state the
    2^(l+1)-dimensional block form or its 2^(L-l) transpose-Gram; for the
    fragment alone the 2^l form or its 2^(L-l+1) counterpart.
    """
    size = len(combos[0])
    m = L - size
    h_f = np.empty(len(combos))
    h_sf = np.empty(len(combos))
    for start in range(0, len(combos), _BATCH):
        chunk = combos[start : start + _BATCH]
        Ap = np.stack([fragment_split(phi_plus, L, s) for s in chunk])
        Am = np.stack([fragment_split(phi_minus, L, s) for s in chunk])
        if size + 1 <= m:
            pp, pm, mm = _gram(Ap, Ap), _gram(Ap, Am), _gram(Am, Am)
            joint = 0.5 * np.block([[pp, pm], [pm.conj().transpose(0, 2, 1), mm]])
        else:
            joint = 0.5 * (_gram_t(Ap, Ap) + _gram_t(Am, Am))
        h_sf[start : start + len(chunk)] = _entropy_batch(np.linalg.eigvalsh(joint))
        if size <= m + 1:
            frag = 0.5 * (_gram(Ap, Ap) + _gram(Am, Am))
        else:
            pp, pm, mm = _gram_t(Ap, Ap), _gram_t(Ap, Am), _gram_t(Am, Am)
            frag = 0.5 * np.block([[pp, pm], [pm.conj().transpose(0, 2, 1), mm]])
        h_f[start : start + len(chunk)] = _entropy_batch(np.linalg.eigvalsh(frag))
    return h_f, h_sf


def reduced_system_fragment(
    branches: BranchState, fragment_sites
) -> DensityMatrix:
    """Reduced density matrix of the qubit plus a set of environment sites.

    Block (a, b) of the result is Tr over the other sites of
    |phi_a><phi_b| / 2, with the qubit as the most significant index bit.
    An empty fragment yields the 2x2 qubit state; the full fragment yields
    the pure global state.
    """
    L = branches.L
    sites = _validate_sites(fragment_sites, L)
    Mp = fragment_split(branches.phi_plus, L, sites)
    Mm = fragment_split(branches.phi_minus, L, sites)
    rho = 0.5 * np.block(
        [[Mp @ Mp.conj().T, Mp @ Mm.conj().T], [Mm @ Mp.conj().T, Mm @ Mm.conj().T]]
    )
    return DensityMatrix(matrix=rho, fragment_sites=sites, includes_system=True)


def vn_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """Von Neumann entropy in nats; eigenvalues below 1e-12 contribute zero."""
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return spectrum_entropy(np.linalg.eigvalsh(matrix))


def system_entropy(branches: BranchState) -> float:
    """Entropy of the qubit alone, from the branch overlap."""
    return decoherence_factor(branches).system_entropy


def mutual_information(branches: BranchState, fragment_sites) -> float:
    """I(S:F) = H_S + H_F - H_SF for one fragment, in nats."""
    L = branches.L
    sites = _validate_sites(fragment_sites, L)
    h_s = system_entropy(branches)
    if not sites:
        return 0.0
    h_f, h_sf = _fragment_entropy_pairs(
        branches.phi_plus, branches.phi_minus, L, [sites]
    )
    return float(h_s + h_f[0] - h_sf[0])


def _sample_combos(
    L: int, size: int, k: int, seed: int
) -> list[tuple[int, ...]]:
    """k distinct size-``size`` site subsets, uniform without replacement."""
    population = comb(L, size)
    if k > population:
        raise SampleCountError(
            f"requested {k} fragments of size {size}, only {population} exist"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    if population <= 100_000:
        combos = list(itertools.combinations(range(1, L + 1), size))
        picks = rng.choice(population, size=k, replace=False)
        return [combos[i] for i in sorted(picks)]
    chosen: set[tuple[int, ...]] = set()
    while len(chosen) < k:
        draw = tuple(sorted(rng.choice(L, size=size, replace=False) + 1))
        chosen.add(draw)
    return sorted(chosen)


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / np.sqrt(values.size))


def averaged_mi(
    branches: BranchState,
    size: int,
    mode: str = "exact",
    sample_count: int | None = None,
    seed: int | None = None,
) -> tuple[float, float]:
    """Fragment-averaged mutual information at one fragment size.

    "exact" averages over all C(L, size) subsets; "sampled" draws
    ``sample_count`` distinct subsets uniformly (deterministic given seed).
    Returns (mean, stderr) over the evaluated fragments.
    """
    L = branches.L
    if not 1 <= size <= L:
        raise ValueError(f"fragment size {size} outside 1..{L}")
    if mode == "exact":
        combos = list(itertools.combinations(range(1, L + 1), size))
    elif mode == "sampled":
        if sample_count is None or seed is None:
            raise ValueError("sampled mode needs sample_count and seed")
        combos = _sample_combos(L, size, sample_count, seed)
    else:
        raise ValueError(f"unknown averaging mode {mode!r}")
    h_s = system_entropy(branches)
    h_f, h_sf = _fragment_entropy_pairs(
        branches.phi_plus, branches.phi_minus, L, combos
    )
    return _mean_stderr(h_s + h_f - h_sf)


def lack_of_redundancy(
    branches: BranchState,
    policy: FragmentPolicy = FragmentPolicy(),
    sample_seed: int = 0,
    hs_threshold: float = H_S_THRESHOLD,
) -> RedundancyCurve:
    """Summed normalized deviation from a perfect redundancy plateau.

    The sum runs over fragment sizes 1..L-1; the curve still reports the full
    fragment, whose mutual information doubles the system entropy.  A system
    entropy at or below ``hs_threshold`` (e.g. at the revival times of the
    uncoupled dynamics) raises instead of returning a silent zero.

    Only subsets up to size L//2 are enumerated: for a pure global state the
    complementary fragment's entropies are the same pair swapped, so each
    subset also yields the mutual information of its complement.
    """
    L = branches.L
    h_s = system_entropy(branches)
    if h_s <= hs_threshold:
        raise DegenerateSystemEntropyError(
            f"system entropy {h_s:.3e} at or below threshold {hs_threshold:.1e}"
        )
    mi_values: list[np.ndarray | None] = [None] * (L + 1)
    meta: list[tuple[str, int] | None] = [None] * (L + 1)
    for small in range(0, L // 2 + 1):
        large = L - small
        kind, count = policy.plan(L, small)
        if kind == "exact":
            combos = list(itertools.combinations(range(1, L + 1), small))
        else:
            combos = _sample_combos(
                L, small, count, seed=(sample_seed * 1000003 + small)
            )
        h_f, h_sf = _fragment_entropy_pairs(
            branches.phi_plus, branches.phi_minus, L, combos
        )
        if small >= 1:
            mi_values[small] = h_s + h_f - h_sf
            meta[small] = (kind, len(combos))
        if large != small:
            # complement reuse: H over (S,F') equals H over F and vice versa
            mi_values[large] = h_s + h_sf - h_f
            meta[large] = (kind, len(combos))
    mi_mean = np.empty(L)
    mi_stderr = np.empty(L)
    for size in range(1, L + 1):
        mi_mean[size - 1], mi_stderr[size - 1] = _mean_stderr(mi_values[size])
    rescaled = mi_mean / h_s
    lr = float(np.abs(1.0 - rescaled[: L - 1]).sum())
    return RedundancyCurve(
        L=L,
        fragment_sizes=np.arange(1, L + 1),
        mi_mean=mi_mean,
        mi_stderr=mi_stderr,
        mi_rescaled=rescaled,
        system_entropy=h_s,
        lack_of_redundancy=lr,
        sampling_meta=tuple(meta[1:]),
    )
