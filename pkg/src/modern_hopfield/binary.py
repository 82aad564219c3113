"""Binary modern Hopfield network with exponential interaction ``F(a) = exp(a)``.

Patterns and states have entries in ``{-1, +1}``; stored patterns are the
columns of ``X``. The energy ``E(xi) = -sum_i exp(xi^T x_i)`` is lowered by
asynchronous component updates, each of which sets ``xi_j`` to the sign
that gives the lower energy with all other components held fixed.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError


def _binary(a, name: str) -> np.ndarray:
    a = np.asarray(a)
    if a.size == 0 or not np.all((a == 1) | (a == -1)):
        raise DomainError(f"{name} must have entries in {{-1, +1}}")
    return a.astype(np.int64)


def binary_patterns(X) -> np.ndarray:
    X = _binary(X, "X")
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DomainError("X must be a d x N matrix")
    return X


def _pair(X, xi):
    X = binary_patterns(X)
    xi = _binary(xi, "xi")
    if xi.shape != (X.shape[0],):
        raise DomainError(f"state of shape {xi.shape} does not match d = {X.shape[0]}")
    return X, xi


def binary_log_neg_energy(X, xi) -> float:
    """``ln(-E(xi)) = ln sum_i exp(xi^T x_i)``, finite for any ``d``."""
    X, xi = _pair(X, xi)
    s = (X.T @ xi).astype(np.float64)
    m = s.max()
    return float(m + np.log(np.sum(np.exp(s - m))))


def binary_energy(X, xi) -> float:
    """``-sum_i exp(xi^T x_i)``; overflows to ``-inf`` once ``d`` exceeds ~709."""
    try:
        return -math.exp(binary_log_neg_energy(X, xi))
    except OverflowError:
        return -math.inf


def binary_update_component(X, xi, j: int) -> int:
    """New value of component ``j``; ties resolve to ``+1``.

    Only the other components of ``xi`` enter, so the result does not depend
    on ``xi[j]``.
    """
    X, xi = _pair(X, xi)
    if not 0 <= j < X.shape[0]:
        raise DomainError(f"component index {j} out of range")
    rest = (X.T @ xi - X[j] * xi[j]).astype(np.float64)
    up = rest + X[j]
    down = rest - X[j]
    # a common shift keeps the exponentials finite without changing the sign
    m = max(up.max(), down.max())
    diff = float(np.sum(np.exp(up - m)) - np.sum(np.exp(down - m)))
    return 1 if diff >= 0 else -1


def binary_sweep(X, xi, order: Optional[Sequence[int]] = None) -> np.ndarray:
    """One asynchronous pass over the components in ``order`` (default ``0..d-1``)."""
    X, xi = _pair(X, xi)
    d = X.shape[0]
    order = np.arange(d) if order is None else np.asarray(order, dtype=int)
    if sorted(order.tolist()) != list(range(d)):
        raise DomainError("order must be a permutation of 0..d-1")
    state = xi.copy()
    for j in order:
        state[j] = binary_update_component(X, state, int(j))
    return state


def demircigil_rate(a: float) -> float:
    """``I(a) = ((1+a) ln(1+a) + (1-a) ln(1-a)) / 2`` on ``[0, 1]``, with ``0 ln 0 = 0``."""
    if not 0 <= a <= 1:
        raise DomainError("a must lie in [0, 1]")
    lo = 0.0 if a == 1 else (1 - a) * math.log1p(-a)
    return 0.5 * ((1 + a) * math.log1p(a) + lo)


def demircigil_capacity_exponent(rho: float) -> float:
    """``I(1 - 2 rho) / 2``: patterns ``exp(alpha d)`` with smaller ``alpha``
    retrieve from a ``rho d`` Hamming ball as ``d -> inf``."""
    if not 0 <= rho <= 0.5:
        raise DomainError("rho must lie in [0, 1/2]")
    return 0.5 * demircigil_rate(1 - 2 * rho)
