"""Energy, update dynamics and fixed-point diagnostics of continuous modern
Hopfield networks.

Conventions
-----------
Stored patterns are the *columns* of a ``d x N`` matrix ``X``. A state
(query) pattern ``xi`` is a length-``d`` vector; several states can be passed
at once as the columns of a ``d x S`` matrix wherever noted.

The energy is::

    E(xi) = -lse(beta, X^T xi) + 0.5 xi^T xi + ln(N) / beta + 0.5 M^2

and the update rule ``xi_new = X softmax(beta X^T xi)`` is its
concave-convex descent step, so iterating it never increases ``E``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import xlogy

from .errors import DomainError

ArrayLike = Union[np.ndarray, Sequence[float]]

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class PatternMatrix:
    """Stored patterns ``X`` (``d x N``, column ``i`` is pattern ``x_i``).

    The maximal norm ``M``, the mean pattern ``m_x`` and the largest
    distance ``m_max`` of a pattern to that mean are computed once on
    construction.
    """

    data: np.ndarray
    M: float = field(init=False)
    m_x: np.ndarray = field(init=False)
    m_max: float = field(init=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise DomainError(f"pattern matrix must be 2-D with d, N >= 1, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise DomainError("pattern matrix has non-finite entries")
        data.setflags(write=False)
        m_x = data.mean(axis=1)
        m_x.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "M", float(np.max(np.linalg.norm(data, axis=0))))
        object.__setattr__(self, "m_x", m_x)
        object.__setattr__(self, "m_max", float(np.max(np.linalg.norm(data - m_x[:, None], axis=0))))

    @classmethod
    def from_rows(cls, rows: ArrayLike) -> "PatternMatrix":
        """Build from a matrix whose *rows* are patterns (layer convention)."""
        return cls(np.asarray(rows, dtype=np.float64).T)

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def N(self) -> int:
        return self.data.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.data[:, i]


def as_patterns(X) -> PatternMatrix:
    return X if isinstance(X, PatternMatrix) else PatternMatrix(X)


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (beta > 0 and math.isfinite(beta)):
        raise DomainError(f"beta must be a positive finite real, got {beta}")
    return beta


def _vector(x, name="x") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise DomainError(f"{name} must be a nonempty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} has non-finite entries")
    return x


def _state(X: PatternMatrix, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim not in (1, 2) or xi.shape[0] != X.d:
        raise DomainError(f"state of shape {xi.shape} does not match pattern dimension {X.d}")
    if not np.all(np.isfinite(xi)):
        raise DomainError("state has non-finite entries")
    return xi


def _check_simplex(p, tol: float = SIMPLEX_TOL) -> np.ndarray:
    p = _vector(p, "p")
    if np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
        raise DomainError("vector is not on the probability simplex")
    return p


# -- log-sum-exp and softmax ------------------------------------------------

def lse(beta: float, x: ArrayLike) -> float:
    """Scaled log-sum-exp ``beta^-1 ln sum_i exp(beta x_i)``.

    Evaluated with a max shift, so ``lse(1, [1000, 1000])`` is
    ``1000 + ln 2`` rather than ``inf``.
    """
    beta = _check_beta(beta)
    x = _vector(x)
    m = x.max()
    return float(m + np.log(np.sum(np.exp(beta * (x - m)))) / beta)


def _softmax_logits(z: np.ndarray, axis: int = 0) -> np.ndarray:
    # z may contain -inf (masked entries) but every slice needs a finite one
    m = np.max(z, axis=axis, keepdims=True)
    if not np.all(np.isfinite(m)):
        raise DomainError("every softmax slice needs at least one finite logit")
    e = np.exp(z - m)
    return e / np.sum(e, axis=axis, keepdims=True)


def softmax(beta: float, x: ArrayLike) -> np.ndarray:
    """``softmax(beta x)``; invariant under adding a constant to ``x``."""
    beta = _check_beta(beta)
    x = _vector(x)
    return _softmax_logits(beta * x)


def softmax_jacobian(p: ArrayLike, beta: float) -> np.ndarray:
    """Jacobian ``beta (diag(p) - p p^T)`` of ``softmax(beta x)`` at ``p``."""
    beta = _check_beta(beta)
    p = _check_simplex(p)
    return beta * (np.diag(p) - np.outer(p, p))


def lse_duality_gap(beta: float, x: ArrayLike, z: ArrayLike) -> float:
    """``lse(beta, x) - (z^T x - beta^-1 sum z_i ln z_i)`` for ``z`` on the simplex.

    The gap is nonnegative and vanishes at ``z = softmax(beta, x)``; ``0 ln 0``
    is taken as 0.
    """
    beta = _check_beta(beta)
    x = _vector(x)
    z = _check_simplex(z)
    if z.shape != x.shape:
        raise DomainError("z and x must have the same length")
    z = np.clip(z, 0.0, None)
    return lse(beta, x) - (float(z @ x) - float(np.sum(xlogy(z, z))) / beta)


# -- energy and update ------------------------------------------------------

def energy(X, xi: ArrayLike, beta: float) -> float:
    """Energy of state ``xi``; always ``>= 0``."""
    X = as_patterns(X)
    beta = _check_beta(beta)
    xi = _state(X, xi)
    if xi.ndim != 1:
        raise DomainError("energy takes a single state vector")
    return (-lse(beta, X.data.T @ xi) + 0.5 * float(xi @ xi)
            + math.log(X.N) / beta + 0.5 * X.M ** 2)


def update(X, xi: ArrayLike, beta: float) -> np.ndarray:
    """One step ``X softmax(beta X^T xi)``.

    ``xi`` may be a ``d x S`` matrix, in which case each column is updated
    independently.
    """
    X = as_patterns(X)
    beta = _check_beta(beta)
    xi = _state(X, xi)
    return X.data @ _softmax_logits(beta * (X.data.T @ xi), axis=0)


def update_jacobian(X, xi: ArrayLike, beta: float) -> np.ndarray:
    """``d x d`` Jacobian ``beta X (diag(p) - p p^T) X^T`` of :func:`update`."""
    X = as_patterns(X)
    beta = _check_beta(beta)
    xi = _state(X, xi)
    if xi.ndim != 1:
        raise DomainError("update_jacobian takes a single state vector")
    p = _softmax_logits(beta * (X.data.T @ xi))
    J = beta * (X.data * p) @ X.data.T - beta * np.outer(X.data @ p, X.data @ p)
    return 0.5 * (J + J.T)


@dataclass(frozen=True)
class IterationConfig:
    max_updates: int = 100
    tol: float = 1e-6
    record_energy: bool = False

    def __post_init__(self):
        if int(self.max_updates) < 1:
            raise DomainError("max_updates must be >= 1")
        if not self.tol >= 0:
            raise DomainError("tol must be >= 0")


@dataclass
class IterationResult:
    fixed_point: np.ndarray
    updates_used: int
    converged: bool
    final_softmax: np.ndarray
    energy_trace: Optional[list] = None
    step_norms: list = field(default_factory=list)


def iterate(X, xi0: ArrayLike, beta: float, cfg: IterationConfig = IterationConfig()) -> IterationResult:
    """Apply :func:`update` until the sup-norm step is ``<= cfg.tol``.

    ``energy_trace`` (when recorded) starts with the energy of ``xi0``.
    ``final_softmax`` is ``softmax(beta X^T xi*)`` at the returned point.
    """
    X = as_patterns(X)
    beta = _check_beta(beta)
    xi = _state(X, xi0).copy()
    if xi.ndim != 1:
        raise DomainError("iterate takes a single state vector; use iterate_batch")
    trace = [energy(X, xi, beta)] if cfg.record_energy else None
    steps = []
    converged = False
    used = 0
    while used < cfg.max_updates:
        new = update(X, xi, beta)
        used += 1
        step = float(np.max(np.abs(new - xi)))
        steps.append(step)
        xi = new
        if trace is not None:
            trace.append(energy(X, xi, beta))
        if step <= cfg.tol:
            converged = True
            break
    p = _softmax_logits(beta * (X.data.T @ xi))
    return IterationResult(xi, used, converged, p, trace, steps)


def iterate_batch(X, Xi0: ArrayLike, beta: float, cfg: IterationConfig = IterationConfig()) -> list:
    """:func:`iterate` for every column of ``Xi0`` (``d x S``), in column order."""
    X = as_patterns(X)
    Xi0 = _state(X, Xi0)
    if Xi0.ndim == 1:
        Xi0 = Xi0[:, None]
    return [iterate(X, Xi0[:, s], beta, cfg) for s in range(Xi0.shape[1])]


# -- separation and certificates -------------------------------------------

@dataclass
class SeparationReport:
    """Per-pattern separation ``Delta_i = x_i^T x_i - max_{j != i} x_i^T x_j``.

    With a single pattern there is no competitor and ``Delta`` is ``+inf``.
    """

    delta: np.ndarray
    delta_min: float
    per_query_c: Optional[tuple] = None


def separation(X, xi: Optional[ArrayLike] = None) -> SeparationReport:
    X = as_patterns(X)
    G = X.data.T @ X.data
    if X.N == 1:
        delta = np.array([np.inf])
    else:
        off = G.copy()
        np.fill_diagonal(off, -np.inf)
        delta = np.diag(G) - off.max(axis=1)
    report = SeparationReport(delta, float(delta.min()))
    if xi is not None:
        report.per_query_c = separation_to_query(X, xi)
    return report


def separation_to_query(X, xi: ArrayLike) -> tuple:
    """Pattern index ``i`` maximising ``min_{j != i} (xi^T x_i - xi^T x_j)`` and that margin.

    Ties go to the lowest index. With one pattern returns ``(0, inf)``.
    """
    X = as_patterns(X)
    xi = _state(X, xi)
    if xi.ndim != 1:
        raise DomainError("separation_to_query takes a single state vector")
    if X.N == 1:
        return 0, math.inf
    s = X.data.T @ xi
    order = np.argsort(-s, kind="stable")
    top, second = s[order[0]], s[order[1]]
    # margin of k is s_k - max_{j != k} s_j; only the largest s_k can be > 0
    margins = s - top
    margins[order[0]] = top - second
    i = int(np.argmax(margins))
    return i, float(margins[i])


@dataclass
class RegimeReport:
    """Sufficient (not necessary) fixed-point certificates for ``(X, beta)``."""

    global_fixed_point_certified: bool
    stored_pattern_certified: np.ndarray
    master_inequality_certified: bool
    metastable_certified: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "global_fixed_point_certified": bool(self.global_fixed_point_certified),
            "stored_pattern_certified": [bool(v) for v in self.stored_pattern_certified],
            "master_inequality_certified": bool(self.master_inequality_certified),
            "metastable_certified": None if self.metastable_certified is None else bool(self.metastable_certified),
        }


def stored_pattern_threshold(N: int, beta: float, M: float) -> float:
    """Separation needed for a fixed point near a pattern: ``2/(beta N) + ln(2 (N-1) N beta M^2)/beta``."""
    with np.errstate(divide="ignore"):
        return 2.0 / (beta * N) + float(np.log(2.0 * (N - 1) * N * beta * M ** 2)) / beta


def _metastable_certificate(X: PatternMatrix, beta: float, cluster: np.ndarray) -> bool:
    inside = X.data[:, cluster]
    outside = np.delete(X.data, cluster, axis=1)
    m_x = inside.mean(axis=1)
    m_max = float(np.max(np.linalg.norm(inside - m_x[:, None], axis=0)))
    if beta * m_max ** 2 > 1:
        return False
    if outside.shape[1] == 0:
        return True
    delta_m = float(m_x @ m_x - np.max(m_x @ outside))
    n_out = outside.shape[1]
    M = X.M
    with np.errstate(divide="ignore"):
        if m_max == 0:
            return False
        arg = (1 - beta * m_max ** 2) / (2 * beta * n_out * M * max(m_max, 2 * M))
        rhs = 2 * M / (beta * m_max) - float(np.log(arg)) / beta
    return bool(delta_m >= rhs)


def classify_regime(X, beta: float, cluster: Optional[Sequence[int]] = None) -> RegimeReport:
    """Evaluate the global, per-pattern and (optional) cluster certificates.

    * global: ``beta m_max^2 < 1`` guarantees a single fixed point;
    * per pattern: ``Delta_i >= 2/(beta N) + ln(2 (N-1) N beta M^2)/beta``;
    * cluster: the mean of the cluster members is separated from the other
      patterns by the metastable-state margin and ``beta m_max^2 <= 1``
      (``m_max`` measured within the cluster).

    A ``False`` flag only means the inequality does not hold.
    """
    from .capacity import master_inequality

    X = as_patterns(X)
    beta = _check_beta(beta)
    sep = separation(X)
    stored = sep.delta >= stored_pattern_threshold(X.N, beta, X.M)
    master = X.N >= 2 and X.M > 0 and master_inequality(sep.delta_min, beta, X.N, X.M)
    meta = None
    if cluster is not None:
        idx = np.unique(np.asarray(cluster, dtype=int))
        if idx.size == 0:
            raise DomainError("cluster must be a nonempty index set")
        if idx.min() < 0 or idx.max() >= X.N:
            raise DomainError("cluster index out of range")
        meta = _metastable_certificate(X, beta, idx)
    return RegimeReport(bool(beta * X.m_max ** 2 < 1), stored, bool(master), meta)


def retrieval_error_bound(X, i: int, beta: float) -> float:
    """``2 e (N-1) M exp(-beta Delta_i)`` bound on ``||f(xi) - x_i||``.

    Valid when both the query and the fixed point are within
    ``1/(2 beta M)`` of ``x_i``; checking that is up to the caller.
    """
    X = as_patterns(X)
    beta = _check_beta(beta)
    if X.N == 1:
        return 0.0
    delta_i = separation(X).delta[i]
    return 2 * math.e * (X.N - 1) * X.M * math.exp(-beta * delta_i)


def one_update_jacobian_bound(X, i: int, r: float, beta: float) -> float:
    """Bound ``2 beta N M^2 (N-1) exp(-beta (Delta_i - 2 r M))`` on the mean-value Jacobian.

    ``r`` stands for ``max(||xi - x_i||, ||x_i* - x_i||)``; the fixed point is
    unknown in general, so the caller supplies it.
    """
    X = as_patterns(X)
    beta = _check_beta(beta)
    if r < 0:
        raise DomainError("radius must be >= 0")
    if X.N == 1:
        return 0.0
    delta_i = separation(X).delta[i]
    return 2 * beta * X.N * X.M ** 2 * (X.N - 1) * math.exp(-beta * (delta_i - 2 * r * X.M))


# -- sequences: forgetting and causal masking -------------------------------

def temporal_update(X_t, xi: ArrayLike, beta: float, gamma: float = 0.0,
                    future_mask: Optional[Sequence[bool]] = None) -> np.ndarray:
    """Update against a time-ordered memory (oldest column first).

    The logit of the pattern seen ``k`` steps ago is lowered by ``gamma k``.
    Positions where ``future_mask`` is True are excluded (logit ``-inf``).
    """
    X = as_patterns(X_t)
    beta = _check_beta(beta)
    if not gamma >= 0:
        raise DomainError("gamma must be >= 0")
    xi = _state(X, xi)
    if xi.ndim != 1:
        raise DomainError("temporal_update takes a single state vector")
    age = np.arange(X.N - 1, -1, -1, dtype=np.float64)
    z = beta * (X.data.T @ xi) - gamma * age
    if future_mask is not None:
        mask = np.asarray(future_mask, dtype=bool)
        if mask.shape != (X.N,):
            raise DomainError(f"mask length {mask.shape} does not match {X.N} patterns")
        z = np.where(mask, -np.inf, z)
    return X.data @ _softmax_logits(z)


# -- mixture-of-Gaussians view ----------------------------------------------

def log_gaussian_mixture_form(X, xi: ArrayLike, beta: float) -> float:
    """Log of ``sum_i exp(beta x_i^T x_i / 2) G(xi; x_i, I/beta)``."""
    X = as_patterns(X)
    beta = _check_beta(beta)
    xi = _state(X, xi)
    diff = X.data - xi[:, None]
    terms = 0.5 * beta * np.sum(X.data ** 2, axis=0) - 0.5 * beta * np.sum(diff ** 2, axis=0)
    m = terms.max()
    return float(0.5 * X.d * math.log(beta / (2 * math.pi)) + m + np.log(np.sum(np.exp(terms - m))))


def gaussian_mixture_form(X, xi: ArrayLike, beta: float) -> float:
    """Weighted isotropic Gaussian mixture whose maxima are the energy minima.

    ``exp(-E(xi))`` equals this value raised to ``1/beta`` times a constant
    that depends only on ``X`` and ``beta``.
    """
    return math.exp(log_gaussian_mixture_form(X, xi, beta))
