"""Targeting eigenstates by normalized energy and probing their entanglement.

Mid-spectrum eigenstates of the weakly disordered ring are volume-law
entangled; strong disorder localizes them and the half-chain entropy drops
toward an area law.  This is the property that later controls how well the
environment can store redundant records.
"""

import numpy as np

from darwinmbl import (
    build_env_hamiltonian,
    build_sector_basis,
    diagonalize,
    draw_fields,
    halfchain_entropy,
    select_eigenstate,
)

L = 10
basis = build_sector_basis(L, L // 2)
print(f"L = {L}, zero-magnetization sector of dimension {basis.dim}\n")

for h in (0.5, 6.0):
    entropies = []
    for seed in range(20):
        spectrum = diagonalize(build_env_hamiltonian(L, draw_fields(L, h, seed), n_up=L // 2))
        selection = select_eigenstate(spectrum, 0.5)
        entropies.append(halfchain_entropy(selection.state, basis))
    mean = np.mean(entropies)
    print(
        f"h = {h:>3}: mid-spectrum eigenstate, 20 realizations: "
        f"S_E = {mean:.3f} nats  (S_E/L = {mean / L:.4f})"
    )

print("\nsingle realization at h = 1.0, seed 0, sweeping the energy target:")
spectrum = diagonalize(build_env_hamiltonian(L, draw_fields(L, 1.0, 0), n_up=L // 2))
for eps in (0.0, 0.25, 0.5, 0.75, 1.0):
    sel = select_eigenstate(spectrum, eps)
    s = halfchain_entropy(sel.state, basis)
    print(
        f"  eps = {eps:4.2f}: index {sel.chosen_index:3d} "
        f"(achieved {sel.epsilon_achieved:.4f}), S_E = {s:.3f}"
    )
print("band edges are weakly entangled; the band centre is the hottest region")
