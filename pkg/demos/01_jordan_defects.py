"""
Defects of a Jordan pair
========================

The pair (I + N, I) with N a nilpotent Jordan block is the smallest
interesting example: its isometric defects are (up to sign) the powers of N,
so the strict order equals the size of the block.
"""

import numpy as np

from defectcalc import DefectKind, TuplePair, iso_defect, multi_index_defect, strictness_order, sym_defect
from defectcalc.instances import gen_jordan_iso

np.set_printoptions(precision=3, suppress=True)

# a 3x3 Jordan pair, written out by hand
N = np.eye(3, k=1)
p = TuplePair.of([np.eye(3) + N], [np.eye(3)])

for k in range(4):
    print(f"isometric defect of order {k}:\n{iso_defect(p, k).real}\n")

# the symmetric defects here are exactly N^k
print("symmetric defect of order 2:\n", sym_defect(p, 2).real)

# strictness_order probes k = 1, 2, ... and stops at the first vanishing defect
rep = strictness_order(p, DefectKind.ISOMETRIC)
print("\nprobes:", rep.probes, "-> strict order", rep.strict_order)

# a random similarity hides the structure but not the order
q = gen_jordan_iso(5, conjugate_seed=7)
print("conjugated 5x5 pair, left entry:\n", q.left[0])
print("strict order:", strictness_order(q).strict_order)

# the multi-index enumeration is an independent route to the same numbers
gap = np.linalg.norm(iso_defect(q, 3) - multi_index_defect(q, 3))
print(f"recursion vs enumeration at order 3: {gap:.2e}")
