"""
Binary network with exponential interactions
============================================

Binary patterns under E = -sum exp(xi^T x_i) are restored from corrupted
versions by a single asynchronous sweep.
"""

import numpy as np

from modern_hopfield import binary_energy, binary_sweep, demircigil_capacity_exponent

rng = np.random.default_rng(3)
d, N = 24, 10
X = rng.choice([-1, 1], size=(d, N))

xi = X[:, 0].copy()
xi[:3] *= -1
print("energy before: %.4g" % binary_energy(X, xi))
restored = binary_sweep(X, xi)
print("energy after:  %.4g" % binary_energy(X, restored))
print("restored:", np.array_equal(restored, X[:, 0]))

###############################################################################
# Asymptotically exp(alpha d) patterns can be retrieved from a Hamming ball
# of radius rho d as long as alpha stays below this exponent.

for rho in (0.0, 0.1, 0.25):
    print(f"rho={rho}: alpha < {demircigil_capacity_exponent(rho):.4f}")
