import itertools

import numpy as np
import pytest

from darwinmbl.basis import build_sector_basis, default_sector, embed_full
from darwinmbl.dynamics import BranchState, decoherence_factor, propagate_lambda0
from darwinmbl.operators import build_env_hamiltonian, draw_fields
from darwinmbl.qinfo import (
    DegenerateSystemEntropyError,
    FragmentPolicy,
    SampleCountError,
    averaged_mi,
    lack_of_redundancy,
    mutual_information,
    reduced_system_fragment,
    vn_entropy,
)
from darwinmbl.spectral import diagonalize, select_eigenstate

from helpers import brute_force_mi, brute_force_rho_sf


def evolved_branches(L, h, seed, t=np.pi / 4, eps=0.5):
    n_up = default_sector(L)
    basis = build_sector_basis(L, n_up)
    spectrum = diagonalize(build_env_hamiltonian(L, draw_fields(L, h, seed), n_up=n_up))
    xi = embed_full(select_eigenstate(spectrum, eps).state, basis)
    return propagate_lambda0(xi, t)


def ghz_branches(L):
    up = np.zeros(2**L, dtype=complex)
    up[0] = 1.0
    down = np.zeros(2**L, dtype=complex)
    down[-1] = 1.0
    return BranchState(phi_plus=up, phi_minus=down, t=0.0, lam=0.0)


def global_state(branches):
    return np.concatenate([branches.phi_plus, branches.phi_minus]) / np.sqrt(2)


def test_empty_fragment_is_qubit_state():
    br = evolved_branches(5, 2.0, seed=1)
    r = decoherence_factor(br).factor
    rho = reduced_system_fragment(br, [])
    assert rho.dim == 2
    assert rho.matrix[0, 0] == pytest.approx(0.5, abs=1e-12)
    assert rho.matrix[1, 1] == pytest.approx(0.5, abs=1e-12)
    assert rho.matrix[0, 1] == pytest.approx(r / 2, abs=1e-12)


def test_full_fragment_is_pure():
    br = evolved_branches(5, 2.0, seed=2)
    rho = reduced_system_fragment(br, range(1, 6)).matrix
    assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("sites", [(1, 2), (2, 5), (1, 3, 6), (4,)])
def test_reduced_matches_brute_force_partial_trace(sites):
    L = 6
    br = evolved_branches(L, 3.0, seed=7)
    psi = global_state(br)
    rho = reduced_system_fragment(br, sites)
    assert np.abs(rho.matrix - brute_force_rho_sf(psi, L, sites)).max() < 1e-12


def test_density_matrix_invariants():
    br = evolved_branches(6, 1.0, seed=3)
    rho = reduced_system_fragment(br, (2, 4, 5)).matrix
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-9)
    assert np.abs(rho - rho.conj().T).max() < 1e-10
    assert np.linalg.eigvalsh(rho).min() > -1e-9


def test_site_validation():
    br = evolved_branches(4, 1.0, seed=0)
    with pytest.raises(ValueError):
        reduced_system_fragment(br, [0])
    with pytest.raises(ValueError):
        reduced_system_fragment(br, [5])
    with pytest.raises(ValueError):
        reduced_system_fragment(br, [2, 2])


def test_vn_entropy_known_values():
    assert vn_entropy(np.diag([1.0, 0.0])) == pytest.approx(0.0, abs=1e-12)
    assert vn_entropy(np.diag([0.5, 0.5])) == pytest.approx(np.log(2), abs=1e-12)
    # -(3/4 ln 3/4 + 1/4 ln 1/4)
    assert vn_entropy(np.diag([0.75, 0.25])) == pytest.approx(
        0.5623351446188083, abs=1e-9
    )


def test_mutual_information_vanishes_initially():
    br = evolved_branches(5, 2.0, seed=4, t=0.0)
    for l in (1, 2, 3):
        for sites in itertools.combinations(range(1, 6), l):
            assert abs(mutual_information(br, sites)) < 1e-12


def test_full_fragment_doubles_system_entropy():
    br = evolved_branches(6, 2.0, seed=5)
    h_s = decoherence_factor(br).system_entropy
    assert mutual_information(br, range(1, 7)) == pytest.approx(2 * h_s, abs=1e-6)


def test_ghz_branches_classical_plateau():
    L = 6
    br = ghz_branches(L)
    for l in (1, 3, 5):
        mean, stderr = averaged_mi(br, l)
        assert mean == pytest.approx(np.log(2), abs=1e-12)
        assert stderr == pytest.approx(0.0, abs=1e-12)
    curve = lack_of_redundancy(br)
    assert curve.lack_of_redundancy == pytest.approx(0.0, abs=1e-8)
    assert curve.mi_mean[-1] == pytest.approx(2 * np.log(2), abs=1e-6)


@pytest.mark.parametrize("sites", [(1,), (2, 3), (1, 4, 5), (2, 3, 4, 6)])
def test_mi_matches_brute_force(sites):
    L = 6
    br = evolved_branches(L, 5.0, seed=8)
    psi = global_state(br)
    assert mutual_information(br, sites) == pytest.approx(
        brute_force_mi(psi, L, sites), abs=1e-10
    )


def test_mi_bounds_and_monotonicity():
    L = 7
    br = evolved_branches(L, 2.0, seed=9)
    h_s = decoherence_factor(br).system_entropy
    curve = lack_of_redundancy(br)
    assert np.all(curve.mi_mean >= -1e-10)
    assert np.all(curve.mi_mean <= 2 * h_s + 1e-8)
    assert np.all(np.diff(curve.mi_mean) >= -1e-8)  # averaged MI grows with l


def test_entropy_symmetry_of_pure_state():
    L = 6
    br = evolved_branches(L, 1.5, seed=10)
    sites = (1, 4)
    complement = tuple(s for s in range(1, L + 1) if s not in sites)
    h_sf = vn_entropy(reduced_system_fragment(br, sites))
    # the complement of (qubit + fragment) is the remaining environment
    from darwinmbl.qinfo import _fragment_entropy_pairs

    h_f_comp, _ = _fragment_entropy_pairs(
        br.phi_plus, br.phi_minus, L, [complement]
    )
    assert h_sf == pytest.approx(float(h_f_comp[0]), abs=1e-8)


def test_averaged_mi_single_combination():
    br = evolved_branches(5, 2.0, seed=11)
    h_s = decoherence_factor(br).system_entropy
    mean, stderr = averaged_mi(br, 5)
    assert mean == pytest.approx(2 * h_s, abs=1e-6)
    assert stderr == 0.0


def test_sampled_mode_agrees_with_exact():
    br = evolved_branches(10, 3.0, seed=12)
    exact_mean, exact_err = averaged_mi(br, 5)
    samp_mean, samp_err = averaged_mi(br, 5, mode="sampled", sample_count=200, seed=0)
    combined = np.hypot(exact_err, samp_err)
    assert abs(samp_mean - exact_mean) <= 3 * combined
    # deterministic given the seed
    again = averaged_mi(br, 5, mode="sampled", sample_count=200, seed=0)
    assert again == (samp_mean, samp_err)


def test_sample_count_exceeding_population():
    br = evolved_branches(10, 3.0, seed=12)
    with pytest.raises(SampleCountError):
        averaged_mi(br, 3, mode="sampled", sample_count=200, seed=0)  # C(10,3)=120


def test_lack_of_redundancy_rejects_zero_entropy():
    br = evolved_branches(5, 2.0, seed=13, t=0.0)  # no decoherence yet
    with pytest.raises(DegenerateSystemEntropyError):
        lack_of_redundancy(br)
    # revival time behaves the same way
    br = evolved_branches(5, 2.0, seed=13, t=np.pi / 2)
    with pytest.raises(DegenerateSystemEntropyError):
        lack_of_redundancy(br)


def test_lr_matches_brute_force_small_chain():
    from helpers import brute_force_lr

    L = 5
    br = evolved_branches(L, 4.0, seed=14)
    curve = lack_of_redundancy(br)
    assert curve.lack_of_redundancy == pytest.approx(
        brute_force_lr(global_state(br), L), abs=1e-8
    )


def test_high_disorder_improves_plateau():
    # ensemble means: high disorder must lower the redundancy deficit
    lows, highs = [], []
    for seed in range(25):
        lows.append(
            lack_of_redundancy(evolved_branches(8, 0.01, seed=seed)).lack_of_redundancy
        )
        highs.append(
            lack_of_redundancy(evolved_branches(8, 5.0, seed=seed)).lack_of_redundancy
        )
    assert np.mean(highs) < np.mean(lows)


def test_fragment_policy_plan():
    policy = FragmentPolicy(mode="auto", exact_limit=100, sample_cap=50)
    assert policy.plan(10, 2) == ("exact", 45)
    assert policy.plan(10, 5) == ("sampled", 50)
    assert FragmentPolicy(mode="exact").plan(10, 5) == ("exact", 252)
    assert FragmentPolicy(mode="sampled", sample_cap=10).plan(10, 1) == ("exact", 10)
    with pytest.raises(ValueError):
        FragmentPolicy(mode="bogus").plan(10, 2)


def test_sampled_policy_reported_in_curve():
    br = evolved_branches(8, 2.0, seed=15)
    curve = lack_of_redundancy(
        br, policy=FragmentPolicy(mode="auto", exact_limit=20, sample_cap=15)
    )
    modes = dict(zip(range(1, 9), curve.sampling_meta))
    assert modes[1] == ("exact", 8)
    assert modes[4] == ("sampled", 15)  # C(8,4)=70 > 20
    assert modes[7] == ("exact", 8)  # complements of size-1 fragments
