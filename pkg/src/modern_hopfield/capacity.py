"""Storage-capacity calculators for continuous modern Hopfield networks.

Random patterns live on the sphere of radius ``M = K sqrt(d - 1)``. With
probability ``1 - p`` at least ``sqrt(p) c^((d-1)/4)`` of them can be stored,
where the base ``c`` follows from the parameters through the Lambert W
function. The helpers here evaluate those formulas, a Lambert-free lower
bound on ``c``, the dimension needed for a given base, and the master
inequality for concrete or placed pattern sets.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import DomainError, InfeasibleError
from .lambert import INV_E, OMEGA, LambertBranch, lambert_w, lambert_w0_exp


@dataclass(frozen=True)
class CapacityParams:
    beta: float
    K: float
    d: int
    p: float

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError("beta must be > 0")
        if not self.K > 0:
            raise DomainError("K must be > 0")
        if int(self.d) != self.d or self.d < 2:
            raise DomainError("d must be an integer >= 2")
        if not 0 < self.p <= 1:
            raise DomainError("p must lie in (0, 1]")

    @property
    def M(self) -> float:
        return self.K * math.sqrt(self.d - 1)

    def coefficients(self) -> tuple:
        """``(a, b)`` of the base inequality ``a c + c ln c - b <= 0``."""
        a = 2.0 / (self.d - 1) * (1.0 + math.log(2.0 * self.beta * self.K ** 2 * self.p * (self.d - 1)))
        b = 2.0 * self.K ** 2 * self.beta / 5.0
        return a, b


@dataclass(frozen=True)
class CapacityResult:
    a: float
    b: float
    c_hat: float
    feasible: bool
    N_lower: float

    def to_dict(self) -> dict:
        return asdict(self)


def _min_base(params: CapacityParams) -> float:
    return (2.0 / math.sqrt(params.p)) ** (4.0 / (params.d - 1))


def _n_lower(params: CapacityParams, c: float) -> float:
    try:
        return math.sqrt(params.p) * c ** ((params.d - 1) / 4.0)
    except OverflowError:
        return math.inf


def capacity_base_c(params: CapacityParams) -> CapacityResult:
    """Base ``c_hat = b / W0(exp(a + ln b))`` of the exponential capacity.

    ``feasible`` reports whether ``c_hat >= (2/sqrt(p))^(4/(d-1))``, the
    condition under which ``N >= sqrt(p) c_hat^((d-1)/4)`` is guaranteed.
    """
    a, b = params.coefficients()
    c_hat = b / lambert_w0_exp(a + math.log(b))
    return CapacityResult(a, b, c_hat, c_hat >= _min_base(params), _n_lower(params, c_hat))


def capacity_base_c_lower(params: CapacityParams) -> float:
    """Lower bound on ``c_hat`` from closed-form upper bounds on ``W0(e^u)``.

    With ``u = a + ln b``::

        c = b / ln((Omega e^u + 1) / (Omega (1 + Omega)))   if u <= 0
        c = b * u^(-u / (u + 1))                            if u > 0
    """
    a, b = params.coefficients()
    u = a + math.log(b)
    if u <= 0:
        return b / math.log((OMEGA * math.exp(u) + 1.0) / (OMEGA * (1.0 + OMEGA)))
    return b * u ** (-u / (u + 1.0))


def capacity_result_from_c(params: CapacityParams, c: float) -> CapacityResult:
    a, b = params.coefficients()
    return CapacityResult(a, b, c, c >= _min_base(params), _n_lower(params, c))


def dimension_coefficients(beta: float, K: float, c: float, p: float) -> tuple:
    """``(a, b)`` of ``ln(d-1) + a (d-1) + b <= 0`` for base ``c``."""
    if not (beta > 0 and K > 0 and c > 0 and 0 < p <= 1):
        raise DomainError("need beta, K, c > 0 and 0 < p <= 1")
    a = math.log(c) / 2.0 - K ** 2 * beta / (5.0 * c)
    b = 1.0 + math.log(2.0 * p * beta * K ** 2)
    return a, b


def capacity_dimension(beta: float, K: float, c: float, p: float) -> float:
    """Real dimension ``d`` at which base ``c`` becomes attainable.

    ``d = 1 + W(a e^-b) / a`` solves ``ln(d-1) + a (d-1) + b = 0`` using the
    upper branch for ``a > 0`` and the lower branch for ``a < 0``;
    ``a = 0`` gives ``d = 1 + e^-b``.

    Raises
    ------
    InfeasibleError
        If ``a e^-b < -1/e``. The left-hand side then stays negative for
        every ``d`` and has no root.
    """
    a, b = dimension_coefficients(beta, K, c, p)
    if a == 0:
        return 1.0 + math.exp(-b)
    arg = a * math.exp(-b)
    if arg < -INV_E:
        raise InfeasibleError(f"a exp(-b) = {arg:.6g} < -1/e: no real dimension solves the equation")
    branch = LambertBranch.UPPER if a > 0 else LambertBranch.LOWER
    return 1.0 + lambert_w(arg, branch) / a


def capacity_dimension_closed_form(beta: float, K: float, c: float, p: float) -> float:
    """Lambert-free approximation ``d = 1 + (b - ln(-a)) / a`` for ``a < 0``."""
    a, b = dimension_coefficients(beta, K, c, p)
    if not a < 0:
        raise InfeasibleError("closed-form dimension needs a < 0")
    return 1.0 + (b - math.log(-a)) / a


def master_inequality(delta_min: float, beta: float, N: int, M: float) -> bool:
    """``Delta_min >= 2/(beta N) + ln(2 N^2 beta M^2) / beta``."""
    if N < 2:
        raise DomainError("master inequality needs N >= 2")
    if not M > 0 or not beta > 0:
        raise DomainError("need M > 0 and beta > 0")
    return bool(delta_min >= 2.0 / (beta * N) + math.log(2.0 * N ** 2 * beta * M ** 2) / beta)


def placed_capacity_margin(K: float, d: int, beta: float, exponent: int) -> float:
    """LHS minus RHS of the master inequality for ``N = 2^(exponent (d-1))``
    patterns placed equidistantly on the sphere ``M = K sqrt(d-1)``.

    Evaluated in log space so large ``exponent (d-1)`` does not overflow.
    """
    if d < 2:
        raise DomainError("d must be >= 2")
    if not (K > 0 and beta > 0) or exponent < 1:
        raise DomainError("need K, beta > 0 and exponent >= 1")
    M2 = K ** 2 * (d - 1)
    log_n = exponent * (d - 1) * math.log(2.0)
    angle = 2.0 * math.pi / 2.0 ** exponent
    lhs = M2 * (1.0 - math.cos(angle))
    rhs = 2.0 * math.exp(-log_n) / beta + (math.log(2.0) + 2.0 * log_n + math.log(beta * M2)) / beta
    return lhs - rhs


def verify_placed_capacity(K: float, d: int, beta: float = 1.0, exponent: int = 2) -> bool:
    """Whether ``2^(exponent (d-1))`` placed patterns satisfy the master inequality."""
    return placed_capacity_margin(K, d, beta, exponent) >= 0
