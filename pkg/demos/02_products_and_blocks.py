"""
Products of commuting pairs
===========================

Multiplying two cross-commuting pairs entrywise usually adds their orders
(minus one).  The direct-sum block tuples show that the sum is only an upper
bound: both factors are strict 2-isometric, and so is their product.
"""

import numpy as np

from defectcalc import TuplePair, gen_block_tuples, product_pair, strictness_order, tensor_strictness_order
from defectcalc.defect import nested_iso_defect
from defectcalc.instances import gen_jordan_iso, gen_tensor_factors

base = TuplePair.of([np.eye(2) + np.eye(2, k=1)], [np.eye(2)])
p1, p2 = gen_block_tuples(base, d=2)
print("block pair 1, first left entry:\n", p1.left[0].real)

prod = product_pair(p1, p2)
print("product pair has", prod.d, "entries")
for name, p in (("factor 1", p1), ("factor 2", p2), ("product", prod)):
    print(f"  {name:9s} strict order {strictness_order(p).strict_order}")

# the nested defect decides whether the product reaches order m1 + m2 - 1
nested, scale = nested_iso_defect(p1, 1, p2, 1)
print(f"nested defect norm {np.linalg.norm(nested):.2e} (term scale {scale:.2f})")

# the tensor pair of the same factors does reach 3
print("tensor pair strict order:", tensor_strictness_order(p1, p2).strict_order)

# lifting two Jordan pairs onto a shared space gives a product that does add up
q1, q2 = gen_tensor_factors(gen_jordan_iso(2, 1), gen_jordan_iso(3, 2))
nested, _ = nested_iso_defect(q1, 1, q2, 2)
print("\nlifted Jordan pairs: product order",
      strictness_order(product_pair(q1, q2)).strict_order,
      f"nested norm {np.linalg.norm(nested):.3f}")
