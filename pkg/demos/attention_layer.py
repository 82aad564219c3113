"""
Hopfield layers as attention
============================

One update of the continuous Hopfield network in a projected space is the
transformer attention mechanism. Pooling and lookup layers follow from the
same update with fixed queries or a fixed memory.
"""

import numpy as np

from modern_hopfield import (Hopfield, HopfieldConfig, HopfieldLayer, HopfieldPooling, ProjectionWeights,
                             hopfield_forward)

rng = np.random.default_rng(1)
S, N, d, d_k = 4, 6, 8, 5

R = rng.normal(size=(S, d))
Y = rng.normal(size=(N, d))
w = ProjectionWeights(W_K=rng.normal(size=(d, d_k)), W_V=rng.normal(size=(d_k, 3)), W_Q=rng.normal(size=(d, d_k)))

###############################################################################
# Compare with scaled dot-product attention written out by hand.

Q, K = R @ w.W_Q, Y @ w.W_K
logits = Q @ K.T / np.sqrt(d_k)
A = np.exp(logits - logits.max(axis=1, keepdims=True))
A /= A.sum(axis=1, keepdims=True)
reference = A @ K @ w.W_V

Z = hopfield_forward(R, Y, w, HopfieldConfig(normalization="none"))
print("max difference to attention: %.1e" % np.abs(Z - reference).max())

###############################################################################
# More updates move the queries further towards fixed points.

layer = Hopfield(w, HopfieldConfig(normalization="none", updates=5))
print("output after 5 updates:\n", np.round(layer(R, Y), 3))

###############################################################################
# Pooling a bag of instances with two learned queries: the output does not
# depend on the order of the bag.

pool = HopfieldPooling(rng.normal(size=(2, d_k)), ProjectionWeights(W_K=w.W_K, W_V=w.W_V))
print("pooling is permutation invariant:", np.allclose(pool(Y), pool(Y[::-1])))

###############################################################################
# A lookup layer over a fixed memory that returns the labels of the closest
# memory items.

memory = 5 * np.eye(4)
labels = np.array([[1, 0], [0, 1], [0, 1], [1, 0]], dtype=float)
lookup = HopfieldLayer(memory, ProjectionWeights.identity(4), HopfieldConfig(beta=1.0, normalization="none"),
                       targets=labels)
print("labels for a query near item 2:", np.round(lookup(memory[2:3] + 0.1), 4))
