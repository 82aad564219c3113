"""Hopfield layers in the row convention of transformer attention.

Raw state patterns ``R`` (``S x d_r``) and raw stored patterns ``Y``
(``N x d_y``) hold one pattern per row. They are projected into a
``d_k``-dimensional associative space, ``Q = R W_Q`` and ``K = Y W_K``, and
one Hopfield update with ``beta = 1/sqrt(d_k)`` is exactly softmax
attention::

    Z = softmax(beta Q K^T) Y W_K W_V

Extra updates iterate ``Q <- softmax(beta Q K^T) K`` in the associative
space; the value projection is applied once at the end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .core import _softmax_logits
from .errors import DomainError

Normalization = Literal["input", "projected", "none"]
ValueSource = Literal["keys", "raw"]


def _matrix(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or 0 in a.shape:
        raise DomainError(f"{name} must be a nonempty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    return a


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax of an already scaled logit matrix."""
    return _softmax_logits(np.asarray(logits, dtype=np.float64), axis=-1)


def pattern_normalize(P, mode: Normalization = "input", eps: float = 1e-5) -> np.ndarray:
    """Center each row and scale it to unit (population) standard deviation.

    Rows whose standard deviation is below ``eps`` are divided by ``eps``
    instead, so constant rows map to zero rows. ``mode="none"`` returns the
    input unchanged.
    """
    P = _matrix(P, "P")
    if mode == "none":
        return P.copy()
    if mode not in ("input", "projected"):
        raise DomainError(f"unknown normalization mode {mode!r}")
    if not eps > 0:
        raise DomainError("eps must be > 0")
    centered = P - P.mean(axis=1, keepdims=True)
    std = np.sqrt(np.mean(centered ** 2, axis=1, keepdims=True))
    return centered / np.maximum(std, eps)


@dataclass(frozen=True)
class ProjectionWeights:
    """``W_Q`` (``d_r x d_k``), ``W_K`` (``d_y x d_k``) and ``W_V``.

    ``W_V`` is ``d_k x d_v`` when values are taken from the keys and
    ``d_y x d_v`` for raw values. ``W_Q`` may be omitted for pooling, where
    the queries already live in the associative space.
    """

    W_K: np.ndarray
    W_V: np.ndarray
    W_Q: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "W_K", _matrix(self.W_K, "W_K"))
        object.__setattr__(self, "W_V", _matrix(self.W_V, "W_V"))
        if self.W_Q is not None:
            object.__setattr__(self, "W_Q", _matrix(self.W_Q, "W_Q"))
            if self.W_Q.shape[1] != self.W_K.shape[1]:
                raise DomainError(f"W_Q {self.W_Q.shape} and W_K {self.W_K.shape} disagree on d_k")

    @property
    def d_k(self) -> int:
        return self.W_K.shape[1]

    @classmethod
    def identity(cls, d: int) -> "ProjectionWeights":
        eye = np.eye(d)
        return cls(W_K=eye, W_V=eye, W_Q=eye)


@dataclass(frozen=True)
class HopfieldConfig:
    """Forward-pass settings.

    ``beta=None`` means ``1/sqrt(d_k)``. ``update_tol`` stops the extra
    updates early once every query moved by at most that much (Euclidean).
    """

    beta: Optional[float] = None
    updates: int = 1
    update_tol: float = 0.0
    normalization: Normalization = "input"
    value_source: ValueSource = "keys"
    eps: float = 1e-5

    def __post_init__(self):
        if self.beta is not None and not self.beta > 0:
            raise DomainError("beta must be > 0")
        if int(self.updates) < 1:
            raise DomainError("updates must be >= 1")
        if not self.update_tol >= 0:
            raise DomainError("update_tol must be >= 0")
        if self.normalization not in ("input", "projected", "none"):
            raise DomainError(f"unknown normalization {self.normalization!r}")
        if self.value_source not in ("keys", "raw"):
            raise DomainError(f"unknown value source {self.value_source!r}")

    def resolve_beta(self, d_k: int) -> float:
        return 1.0 / math.sqrt(d_k) if self.beta is None else float(self.beta)


@dataclass
class LayerOutput:
    Z: np.ndarray
    attention: np.ndarray
    updates_used: int
    states: list = field(default_factory=list)


def _associate(Q: np.ndarray, K: np.ndarray, beta: float, cfg: HopfieldConfig):
    """Run the projected-space updates; return the final softmax and the number of updates."""
    states = [Q]
    used = 1
    A = softmax_rows(beta * Q @ K.T)
    while used < cfg.updates:
        Q_new = A @ K
        step = float(np.max(np.linalg.norm(Q_new - Q, axis=1)))
        Q = Q_new
        states.append(Q)
        A = softmax_rows(beta * Q @ K.T)
        used += 1
        if step <= cfg.update_tol:
            break
    return A, used, states


def _values(Y: np.ndarray, K: np.ndarray, w: ProjectionWeights, cfg: HopfieldConfig) -> np.ndarray:
    if cfg.value_source == "keys":
        if w.W_V.shape[0] != K.shape[1]:
            raise DomainError(f"W_V {w.W_V.shape} must have d_k = {K.shape[1]} rows")
        return K @ w.W_V
    if w.W_V.shape[0] != Y.shape[1]:
        raise DomainError(f"W_V {w.W_V.shape} must have d_y = {Y.shape[1]} rows for raw values")
    return Y @ w.W_V


def _keys(Y: np.ndarray, w: ProjectionWeights, cfg: HopfieldConfig) -> tuple:
    if Y.shape[1] != w.W_K.shape[0]:
        raise DomainError(f"Y has {Y.shape[1]} columns but W_K expects {w.W_K.shape[0]}")
    if cfg.normalization == "input":
        Y = pattern_normalize(Y, "input", cfg.eps)
    K = Y @ w.W_K
    if cfg.normalization == "projected":
        K = pattern_normalize(K, "projected", cfg.eps)
    return Y, K


def hopfield_associate(R, Y, w: ProjectionWeights, cfg: HopfieldConfig = HopfieldConfig(),
                       value_override=None) -> LayerOutput:
    """Full forward pass returning output, attention matrix and iterates."""
    R = _matrix(R, "R")
    Y = _matrix(Y, "Y")
    if w.W_Q is None:
        raise DomainError("hopfield forward needs W_Q")
    if R.shape[1] != w.W_Q.shape[0]:
        raise DomainError(f"R has {R.shape[1]} columns but W_Q expects {w.W_Q.shape[0]}")
    Y, K = _keys(Y, w, cfg)
    if cfg.normalization == "input":
        R = pattern_normalize(R, "input", cfg.eps)
    Q = R @ w.W_Q
    if cfg.normalization == "projected":
        Q = pattern_normalize(Q, "projected", cfg.eps)
    return _finish(Q, Y, K, w, cfg, value_override)


def _finish(Q, Y, K, w, cfg, value_override) -> LayerOutput:
    beta = cfg.resolve_beta(K.shape[1])
    A, used, states = _associate(Q, K, beta, cfg)
    if value_override is not None:
        V = _matrix(value_override, "value_override")
        if V.shape[0] != K.shape[0]:
            raise DomainError(f"value_override has {V.shape[0]} rows, memory has {K.shape[0]}")
    else:
        V = _values(Y, K, w, cfg)
    return LayerOutput(A @ V, A, used, states)


def hopfield_forward(R, Y, w: ProjectionWeights, cfg: HopfieldConfig = HopfieldConfig()) -> np.ndarray:
    """``softmax(beta R W_Q W_K^T Y^T) Y W_K W_V`` (``S x d_v``), plus optional extra updates."""
    return hopfield_associate(R, Y, w, cfg).Z


def hopfield_pooling_forward(Q_static, Y, w: ProjectionWeights,
                             cfg: HopfieldConfig = HopfieldConfig()) -> np.ndarray:
    """Pool the rows of ``Y`` with fixed queries given in the associative space.

    Each output row is a softmax-weighted average of the value projections
    of the stored patterns.
    """
    Q = _matrix(Q_static, "Q_static")
    Y = _matrix(Y, "Y")
    if Q.shape[1] != w.d_k:
        raise DomainError(f"static queries have width {Q.shape[1]}, associative space has {w.d_k}")
    Y, K = _keys(Y, w, cfg)
    if cfg.normalization == "projected":
        Q = pattern_normalize(Q, "projected", cfg.eps)
    return _finish(Q, Y, K, w, cfg, None).Z


def hopfield_layer_forward(R, Y_fixed, w: ProjectionWeights, cfg: HopfieldConfig = HopfieldConfig(),
                           value_override=None) -> np.ndarray:
    """Query a fixed memory ``Y_fixed``.

    With ``value_override`` (``N`` rows, e.g. one-hot labels) the output is
    the similarity-weighted average of those rows instead of the projected
    memory.
    """
    return hopfield_associate(R, Y_fixed, w, cfg, value_override).Z


class Hopfield:
    """Association of two sets of raw patterns."""

    def __init__(self, weights: ProjectionWeights, config: HopfieldConfig = HopfieldConfig()):
        self.weights = weights
        self.config = config

    def __call__(self, R, Y) -> np.ndarray:
        return hopfield_forward(R, Y, self.weights, self.config)


class HopfieldPooling:
    """Pooling of a set with learned static queries."""

    def __init__(self, queries, weights: ProjectionWeights, config: HopfieldConfig = HopfieldConfig()):
        self.queries = _matrix(queries, "queries")
        self.weights = weights
        self.config = config

    def __call__(self, Y) -> np.ndarray:
        return hopfield_pooling_forward(self.queries, Y, self.weights, self.config)


class HopfieldLayer:
    """Lookup into a memory fixed at construction (e.g. a training set)."""

    def __init__(self, memory, weights: ProjectionWeights, config: HopfieldConfig = HopfieldConfig(),
                 targets=None):
        self.memory = _matrix(memory, "memory")
        self.targets = None if targets is None else _matrix(targets, "targets")
        if self.targets is not None and self.targets.shape[0] != self.memory.shape[0]:
            raise DomainError("targets and memory must have the same number of rows")
        self.weights = weights
        self.config = config

    def __call__(self, R) -> np.ndarray:
        return hopfield_layer_forward(R, self.memory, self.weights, self.config, self.targets)


# -- analytic gradients ------------------------------------------------------
#
# All gradients are of the scalar a^T xi_new with respect to a weight matrix,
# for a single query. Y holds stored patterns as rows, and J = Y^T J_s Y is
# the update Jacobian with J_s = beta (diag(p) - p p^T).

def _softmax_state(r, Y, mapped_keys, beta):
    p = _softmax_logits(beta * (mapped_keys @ r))
    Js = beta * (np.diag(p) - np.outer(p, p))
    return p, Y.T @ Js @ Y


def _grad_inputs(r, Y, a, name_r="xi"):
    r = np.asarray(r, dtype=np.float64)
    if r.ndim != 1:
        raise DomainError(f"{name_r} must be a vector")
    Y = _matrix(Y, "Y")
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1:
        raise DomainError("a must be a vector")
    return r, Y, a


def grad_w(xi, Y, W, a, beta: Optional[float] = None, full: bool = False) -> np.ndarray:
    """Gradient of ``a^T xi_new`` with respect to ``W`` (``d_y x d``).

    Stored patterns are mapped by ``K = Y W`` into the query space.

    * simplified update ``xi_new = Y^T softmax(beta Y W xi)``
      (``a`` has length ``d_y``): ``(J a) xi^T``;
    * full update ``xi_new = W^T Y^T softmax(beta Y W xi)``
      (``a`` has length ``d``): ``(Y^T p) a^T + (J W a) xi^T``.

    ``beta=None`` means ``1/sqrt(d)``.
    """
    xi, Y, a = _grad_inputs(xi, Y, a)
    W = _matrix(W, "W")
    if W.shape != (Y.shape[1], xi.shape[0]):
        raise DomainError(f"W must be {(Y.shape[1], xi.shape[0])}, got {W.shape}")
    beta = 1.0 / math.sqrt(W.shape[1]) if beta is None else beta
    p, J = _softmax_state(xi, Y, Y @ W, beta)
    if not full:
        if a.shape[0] != Y.shape[1]:
            raise DomainError("a must have length d_y for the simplified update")
        return np.outer(J @ a, xi)
    if a.shape[0] != W.shape[1]:
        raise DomainError("a must have length d for the full update")
    return np.outer(Y.T @ p, a) + np.outer(J @ (W @ a), xi)


def _check_qk(r, Y, weights: ProjectionWeights):
    if weights.W_Q is None:
        raise DomainError("W_Q is required")
    if weights.W_Q.shape[0] != r.shape[0] or weights.W_K.shape[0] != Y.shape[1]:
        raise DomainError("weight shapes do not match r and Y")


def grad_wq(r, Y, weights: ProjectionWeights, a, beta: Optional[float] = None, full: bool = False) -> np.ndarray:
    """Gradient of ``a^T xi_new`` with respect to ``W_Q`` (``d_r x d_k``).

    Simplified update ``xi_new = Y^T p`` gives ``r (W_K^T J a)^T``; the full
    update ``xi_new = W_K^T Y^T p`` gives ``r (W_K^T J W_K a)^T``. Here
    ``p = softmax(beta Y W_K W_Q^T r)``.
    """
    r, Y, a = _grad_inputs(r, Y, a, "r")
    _check_qk(r, Y, weights)
    WQ, WK = weights.W_Q, weights.W_K
    beta = 1.0 / math.sqrt(WK.shape[1]) if beta is None else beta
    p, J = _softmax_state(r @ WQ, Y, Y @ WK, beta)
    a_raw = WK @ a if full else a
    if a_raw.shape[0] != Y.shape[1]:
        raise DomainError("a has the wrong length for this update variant")
    return np.outer(r, WK.T @ (J @ a_raw))


def grad_wk(r, Y, weights: ProjectionWeights, a, beta: Optional[float] = None, full: bool = False) -> np.ndarray:
    """Gradient of ``a^T xi_new`` with respect to ``W_K`` (``d_y x d_k``).

    Simplified: ``(J a) q^T`` with ``q = W_Q^T r``. Full:
    ``(Y^T p) a^T + (J W_K a) q^T``.
    """
    r, Y, a = _grad_inputs(r, Y, a, "r")
    _check_qk(r, Y, weights)
    WQ, WK = weights.W_Q, weights.W_K
    beta = 1.0 / math.sqrt(WK.shape[1]) if beta is None else beta
    q = r @ WQ
    p, J = _softmax_state(q, Y, Y @ WK, beta)
    if not full:
        if a.shape[0] != Y.shape[1]:
            raise DomainError("a must have length d_y for the simplified update")
        return np.outer(J @ a, q)
    if a.shape[0] != WK.shape[1]:
        raise DomainError("a must have length d_k for the full update")
    return np.outer(Y.T @ p, a) + np.outer(J @ (WK @ a), q)


# -- Gaussian averaging heads -----------------------------------------------

@dataclass(frozen=True)
class GaussianHeadParams:
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if mu.ndim != 1 or sigma.shape != mu.shape:
            raise DomainError("mu and sigma must be vectors of equal length")
        if not np.all(sigma > 0):
            raise DomainError("sigma must be positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


def supporting_points(N: int) -> np.ndarray:
    """``N`` equidistant points spanning ``[-1, 1]``."""
    if N < 2:
        raise DomainError("need N >= 2 supporting points")
    j = np.arange(N, dtype=np.float64)
    return (j - 0.5 * (N - 1)) / (0.5 * (N - 1))


def gaussian_head_attention(params: GaussianHeadParams, N: int) -> np.ndarray:
    """Input-independent ``N x N`` attention from a discrete Gaussian kernel.

    Row ``i`` is ``exp(-0.5 ((s_j - mu_i) / sigma_i)^2)`` over the
    supporting points ``s_j``, normalized to sum to one.
    """
    s = supporting_points(N)
    if params.mu.shape != (N,):
        raise DomainError(f"parameters have length {params.mu.shape[0]}, expected {N}")
    logits = -0.5 * ((s[None, :] - params.mu[:, None]) / params.sigma[:, None]) ** 2
    return softmax_rows(logits)


def gaussian_head_init(N: int, scheme: str = "random", seed: int = 0,
                       sigma_range: tuple = (0.75, 1.25)) -> GaussianHeadParams:
    """Initial head parameters.

    ``"random"`` draws ``mu ~ U[-1, 1]`` and ``sigma ~ U[0.75, 1.25]`` from a
    Philox (counter-based) generator seeded with ``seed``; ``"supports"``
    places ``mu`` on the supporting points with ``sigma = 1``.
    """
    s = supporting_points(N)
    if scheme == "supports":
        return GaussianHeadParams(s.copy(), np.ones(N))
    if scheme != "random":
        raise DomainError(f"unknown init scheme {scheme!r}")
    rng = np.random.Generator(np.random.Philox(seed))
    mu = rng.uniform(-1.0, 1.0, size=N)
    sigma = rng.uniform(sigma_range[0], sigma_range[1], size=N)
    return GaussianHeadParams(mu, sigma)


def gaussian_param_ratio(d_y: int, d_k: int, N: int) -> float:
    """Parameters of a ``W_Q, W_K`` attention head per Gaussian-head parameter.

    ``(2 d_k d_y) / (2 N)``, exactly 96.0 for ``(768, 64, 512)``.
    """
    if not (d_y > 0 and d_k > 0 and N > 0):
        raise DomainError("d_y, d_k and N must be positive")
    return (2.0 * d_k * d_y) / (2.0 * N)
