"""
How many patterns fit
=====================

Evaluate the exponential capacity in the pattern dimension for random
patterns on a sphere, and the dimension needed for a prescribed base.
"""

from modern_hopfield import CapacityParams, capacity_base_c, capacity_base_c_lower
from modern_hopfield.capacity import capacity_dimension_closed_form, verify_placed_capacity

###############################################################################
# Base c of N >= sqrt(p) c^((d-1)/4), exactly (Lambert W) and from the
# closed-form lower bound.

for params in (CapacityParams(beta=1, K=3, d=20, p=0.001), CapacityParams(beta=1, K=1, d=75, p=0.001)):
    exact = capacity_base_c(params)
    print(f"K={params.K} d={params.d}: c_hat={exact.c_hat:.4f}  lower={capacity_base_c_lower(params):.4f}  "
          f"N >= {exact.N_lower:.3g}  feasible={exact.feasible}")

###############################################################################
# Dimension needed for base c = 2.

print("d needed for c=2: %.2f" % capacity_dimension_closed_form(beta=1, K=3, c=2, p=0.001))

###############################################################################
# Patterns placed equidistantly: 2^(2(d-1)) of them still satisfy the
# retrieval condition once the radius is large enough.

for K in (1, 2, 3):
    print(f"K={K}, d=4: 2^(2(d-1)) placed patterns retrievable: {verify_placed_capacity(K, 4, 1, 2)}")
