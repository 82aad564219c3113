"""Real branches of the Lambert W function, the inverse of ``w -> w e^w``.

``W0`` (upper branch) is defined on ``[-1/e, inf)``, ``W-1`` (lower branch)
on ``[-1/e, 0)``. Values are refined with Halley's method from a branch
specific starting guess.
"""
from __future__ import annotations

import math
from enum import IntEnum

import numpy as np

from .errors import DomainError

INV_E = math.exp(-1.0)
OMEGA = 0.5671432904097838  # W0(1)

_MAX_ITER = 50
_EPS = np.finfo(np.float64).eps


class LambertBranch(IntEnum):
    UPPER = 0
    LOWER = -1


def _branch_point_series(p: float, sign: float) -> float:
    # W around -1/e in powers of p = sqrt(2 (e x + 1)); sign +1 -> W0, -1 -> W-1
    q = sign * p
    return -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q ** 3 - 43.0 / 540.0 * q ** 4


def _initial_guess(x: float, branch: LambertBranch) -> float:
    p2 = 2.0 * (math.e * x + 1.0)
    p = math.sqrt(max(p2, 0.0))
    if branch is LambertBranch.UPPER:
        if x < -0.25:
            return _branch_point_series(p, 1.0)
        if x < math.e:
            return math.log1p(x)
        l1 = math.log(x)
        l2 = math.log(l1)
        return l1 - l2 + l2 / l1
    if x < -0.25:
        return _branch_point_series(p, -1.0)
    l1 = math.log(-x)
    l2 = math.log(-l1)
    return l1 - l2 + l2 / l1


def _halley(x: float, w: float) -> float:
    for _ in range(_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        dw = f / denom
        w -= dw
        if abs(dw) <= 4.0 * _EPS * (1.0 + abs(w)):
            break
    return w


def _lambert_scalar(x: float, branch: LambertBranch) -> float:
    if math.isnan(x):
        raise DomainError("Lambert W of NaN")
    if x < -INV_E:
        raise DomainError(f"Lambert W undefined for x = {x!r} < -1/e")
    if branch is LambertBranch.LOWER and x >= 0:
        raise DomainError(f"lower Lambert branch needs -1/e <= x < 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    p2 = 2.0 * (math.e * x + 1.0)
    if p2 < 1e-16:
        # within rounding of the branch point; the series is exact to O(p^4)
        return _branch_point_series(math.sqrt(max(p2, 0.0)), 1.0 if branch is LambertBranch.UPPER else -1.0)
    return _halley(x, _initial_guess(x, branch))


def lambert_w(x, branch: LambertBranch = LambertBranch.UPPER):
    """Real Lambert W on the chosen branch.

    Parameters
    ----------
    x : float or array_like
        Argument, ``x >= -1/e`` (and ``x < 0`` for the lower branch).
    branch : LambertBranch or int
        ``0`` for ``W0``, ``-1`` for ``W-1``.

    Returns
    -------
    float or ndarray
        ``w`` with ``w e^w = x``.

    Raises
    ------
    DomainError
        If ``x`` lies outside the branch's domain.
    """
    branch = LambertBranch(int(branch))
    if np.ndim(x) == 0:
        return _lambert_scalar(float(x), branch)
    arr = np.asarray(x, dtype=np.float64)
    out = np.empty_like(arr)
    for idx, v in np.ndenumerate(arr):
        out[idx] = _lambert_scalar(float(v), branch)
    return out


def lambert_w0_exp(u: float) -> float:
    """``W0(exp(u))`` without forming ``exp(u)``.

    Solves ``w + ln w = u``; useful when ``u`` is beyond the float range of
    ``exp``.
    """
    u = float(u)
    if u < 700.0:
        return _lambert_scalar(math.exp(u), LambertBranch.UPPER)
    w = u - math.log(u)
    for _ in range(_MAX_ITER):
        # Newton on g(w) = w + ln w - u
        dw = (w + math.log(w) - u) / (1.0 + 1.0 / w)
        w -= dw
        if abs(dw) <= 4.0 * _EPS * abs(w):
            break
    return w
