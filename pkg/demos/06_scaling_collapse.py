"""Finite-size scaling collapse and the (h_c, nu) grid search.

Curves of different sizes should fall on a single function of
sgn(h - h_c) * L * |h - h_c|^nu once the critical point and exponent are
right.  The grid search minimizes the spread between sizes; a planted
synthetic dataset shows it recovers the true parameters.
"""

import numpy as np

from darwinmbl import collapse, collapse_search

h = np.arange(0.5, 6.01, 0.25)
h_c_true, nu_true = 3.2, 0.9


def master_curve(x):
    return 1.0 / (1.0 + np.exp(x / 4.0))


data = {}
for L in (8, 10, 12, 14):
    x = np.sign(h - h_c_true) * L * np.abs(h - h_c_true) ** nu_true
    data[L] = (h, master_curve(x))

print(f"planted parameters: h_c = {h_c_true}, nu = {nu_true}")
best = collapse_search(data)
print(f"grid search found:  h_c = {best.h_c:.2f}, nu = {best.nu:.2f}")
print(f"collapse cost at the optimum: {best.quality:.3e}\n")

print("cost profile along h_c (nu fixed at the optimum):")
for h_c in np.arange(best.h_c - 1.0, best.h_c + 1.01, 0.25):
    quality = collapse(data, h_c, best.nu).quality
    bar = "#" * max(1, int(40 * min(quality, 2.0) / 2.0))
    print(f"  h_c = {h_c:4.2f}: {quality:9.4f} {bar}")
print("\nthe cost valley is sharp in h_c, which is what the mobility-edge")
print("markers and the acceptance self-test rely on")
