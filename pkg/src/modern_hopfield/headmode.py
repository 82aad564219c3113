"""Operating-mode analysis of attention heads.

For every attention row we count the minimal number ``k`` of largest
weights needed to reach 90% of the mass. The median ``k_bar`` over all rows
of a head, relative to the sequence length ``n``, assigns the head to one
of four classes::

    I    n/2  <  k_bar            (averaging over nearly everything)
    II   n/8  <  k_bar <= n/2
    III  n/32 <  k_bar <= n/8
    IV           k_bar <= n/32    (a few tokens, close to a single pattern)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import DomainError

INGEST_TOL = 1e-6
# cumulative sums are compared with this slack so that exact masses such as
# 1.0 are reached despite rounding
MASS_SLACK = 1e-12


class HeadClass(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


def as_attention_row(weights, tol: float = INGEST_TOL) -> np.ndarray:
    """Validate a softmax row and renormalize it to sum to one.

    Small negative entries (``>= -1e-12``) are clipped to zero; sums off by
    more than ``tol`` are rejected.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise DomainError("attention row must be a nonempty vector")
    if not np.all(np.isfinite(w)) or np.any(w < -1e-12):
        raise DomainError("attention row has negative or non-finite entries")
    total = w.sum()
    if abs(total - 1.0) > tol:
        raise DomainError(f"attention row sums to {total!r}, not 1")
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def min_count_k(row, mass: float = 0.90) -> int:
    """Smallest ``k`` such that the ``k`` largest entries sum to at least ``mass``."""
    if not 0 < mass <= 1:
        raise DomainError("mass must lie in (0, 1]")
    w = np.asarray(row, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise DomainError("attention row must be a nonempty vector")
    top = w[np.argsort(-w, kind="stable")]
    csum = np.cumsum(top)
    hit = np.nonzero(csum >= mass - MASS_SLACK)[0]
    return int(hit[0]) + 1 if hit.size else int(w.size)


def classify_k(k_median: float, n: int) -> HeadClass:
    if k_median > n / 2:
        return HeadClass.I
    if k_median > n / 8:
        return HeadClass.II
    if k_median > n / 32:
        return HeadClass.III
    return HeadClass.IV


def classify_head(k_values: Sequence[int], n: int) -> HeadClass:
    """Class of a head from its per-row counts (median of even lists = mean of the middle two)."""
    k = np.asarray(k_values, dtype=np.float64)
    if k.size == 0:
        raise DomainError("no k values")
    if n < 1:
        raise DomainError("n must be >= 1")
    return classify_k(float(np.median(k)), n)


def softmax_jacobian_frobenius(row, beta: float = 1.0) -> float:
    """``||beta (diag(p) - p p^T)||_F`` from the moments of ``p``.

    Uses ``sum p^2 - 2 sum p^3 + (sum p^2)^2`` for the squared norm of
    ``diag(p) - p p^T``, so no ``N x N`` matrix is formed.
    """
    p = np.asarray(row, dtype=np.float64)
    s2 = float(np.sum(p ** 2))
    s3 = float(np.sum(p ** 3))
    return beta * float(np.sqrt(max(s2 - 2.0 * s3 + s2 * s2, 0.0)))


@dataclass
class HeadModeReport:
    k_values: List[int]
    k_median: float
    n: int
    head_class: HeadClass
    frobenius_norms: Optional[List[float]] = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "k_values": list(self.k_values),
            "k_median": self.k_median,
            "n": self.n,
            "class": self.head_class.value,
        }
        if self.frobenius_norms is not None:
            out["frobenius_norms"] = list(self.frobenius_norms)
        return out


def analyze_head(rows: Iterable, n: Optional[int] = None, mass: float = 0.90,
                 beta: Optional[float] = 1.0) -> HeadModeReport:
    """Count ``k`` for every row of one head and classify it.

    ``rows`` may be a 2-D array or an iterable of rows, all of length ``n``.
    Frobenius norms of the softmax Jacobian are attached unless ``beta`` is
    None. Padding positions are not filtered; pass only the rows to count.
    """
    checked = [as_attention_row(r) for r in rows]
    if not checked:
        raise DomainError("a head needs at least one attention row")
    lengths = {r.size for r in checked}
    if len(lengths) != 1:
        raise DomainError(f"inconsistent row lengths {sorted(lengths)}")
    length = lengths.pop()
    if n is None:
        n = length
    elif n != length:
        raise DomainError(f"rows have length {length}, expected {n}")
    ks = [min_count_k(r, mass) for r in checked]
    k_median = float(np.median(ks))
    norms = None if beta is None else [softmax_jacobian_frobenius(r, beta) for r in checked]
    return HeadModeReport(ks, k_median, n, classify_k(k_median, n), norms)


def analyze_series(checkpoints: Sequence, n: Optional[int] = None, mass: float = 0.90,
                   beta: Optional[float] = 1.0) -> List[HeadModeReport]:
    """One report per checkpoint, in the given order."""
    reports = [analyze_head(rows, n, mass, beta) for rows in checkpoints]
    if len({r.n for r in reports}) > 1:
        raise DomainError("checkpoints have different sequence lengths")
    return reports
