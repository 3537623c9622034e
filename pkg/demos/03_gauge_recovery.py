"""
Recovering a tensor splitting
=============================

Given two factor pairs whose tensor pair is strict m-isometric, the solver
finds a scalar c with (S1, T1/c) strict m1-isometric and (S2, c T2) strict
m2-isometric, where m = m1 + m2 - 1.  The scalar is read off the minimal
polynomial of the sandwich map on the Krylov space of the identity.
"""

import numpy as np

from defectcalc import decompose_iso, decompose_sym, krylov_min_poly, scale_pair
from defectcalc.instances import conjugate_pair, planted_pair, random_similarity

rng = np.random.default_rng(3)
c = 3 * np.exp(1j * np.pi / 4)

# two planted factors of orders 3 and 2 with d = 2, hidden by similarities
f1 = conjugate_pair(planted_pair(rng, "iso", 3, d=2), random_similarity(rng, 3))
f2 = conjugate_pair(planted_pair(rng, "iso", 2, d=2), random_similarity(rng, 2))
g1, g2 = scale_pair(f1, c), scale_pair(f2, 1 / c)

mp = krylov_min_poly(g1)
print("minimal polynomial coefficients (ascending):")
print(np.round(np.array(mp.coeffs), 6))

r = decompose_iso(g1, g2)
print(f"\nplanted c = {c:.6f}, recovered c = {r.c:.6f}")
print(f"orders m1 = {r.m1}, m2 = {r.m2}, tensor order {r.tensor_order}")
print(f"certificate residuals {r.residual1:.1e}, {r.residual2:.1e}")

# the symmetric version goes through the inverses of the summed left tuples
h1 = conjugate_pair(planted_pair(rng, "sym", 2, d=3), random_similarity(rng, 2))
h2 = conjugate_pair(planted_pair(rng, "sym", 4, d=3), random_similarity(rng, 4))
r = decompose_sym(scale_pair(h1, -0.5), scale_pair(h2, -2.0))
print(f"\nsymmetric: c = {r.c:.6f}, m1 = {r.m1}, m2 = {r.m2}")
