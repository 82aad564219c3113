"""Continuous modern Hopfield networks: energy, update dynamics, capacity,
attention equivalence and attention-head diagnostics."""

from .binary import (
    binary_energy,
    binary_sweep,
    binary_update_component,
    demircigil_capacity_exponent,
    demircigil_rate,
)
from .capacity import (
    CapacityParams,
    CapacityResult,
    capacity_base_c,
    capacity_base_c_lower,
    capacity_dimension,
    capacity_dimension_closed_form,
    master_inequality,
    verify_placed_capacity,
)
from .core import (
    IterationConfig,
    IterationResult,
    PatternMatrix,
    classify_regime,
    energy,
    gaussian_mixture_form,
    iterate,
    iterate_batch,
    lse,
    lse_duality_gap,
    one_update_jacobian_bound,
    retrieval_error_bound,
    separation,
    separation_to_query,
    softmax,
    softmax_jacobian,
    temporal_update,
    update,
    update_jacobian,
)
from .errors import DomainError, InfeasibleError
from .headmode import (
    HeadClass,
    analyze_head,
    analyze_series,
    classify_head,
    min_count_k,
    softmax_jacobian_frobenius,
)
from .lambert import LambertBranch, lambert_w
from .layers import (
    GaussianHeadParams,
    Hopfield,
    HopfieldConfig,
    HopfieldLayer,
    HopfieldPooling,
    ProjectionWeights,
    gaussian_head_attention,
    gaussian_head_init,
    gaussian_param_ratio,
    grad_w,
    grad_wk,
    grad_wq,
    hopfield_forward,
    hopfield_layer_forward,
    hopfield_pooling_forward,
    pattern_normalize,
)

__version__ = "0.1.0"

__all__ = [
    "analyze_head",
    "analyze_series",
    "binary_energy",
    "binary_sweep",
    "binary_update_component",
    "capacity_base_c",
    "capacity_base_c_lower",
    "capacity_dimension",
    "capacity_dimension_closed_form",
    "CapacityParams",
    "CapacityResult",
    "classify_head",
    "classify_regime",
    "demircigil_capacity_exponent",
    "demircigil_rate",
    "DomainError",
    "energy",
    "gaussian_head_attention",
    "gaussian_head_init",
    "gaussian_mixture_form",
    "gaussian_param_ratio",
    "GaussianHeadParams",
    "grad_w",
    "grad_wk",
    "grad_wq",
    "HeadClass",
    "Hopfield",
    "hopfield_forward",
    "hopfield_layer_forward",
    "hopfield_pooling_forward",
    "HopfieldConfig",
    "HopfieldLayer",
    "HopfieldPooling",
    "InfeasibleError",
    "iterate",
    "iterate_batch",
    "IterationConfig",
    "IterationResult",
    "lambert_w",
    "LambertBranch",
    "lse",
    "lse_duality_gap",
    "master_inequality",
    "min_count_k",
    "one_update_jacobian_bound",
    "pattern_normalize",
    "PatternMatrix",
    "ProjectionWeights",
    "retrieval_error_bound",
    "separation",
    "separation_to_query",
    "softmax",
    "softmax_jacobian",
    "softmax_jacobian_frobenius",
    "temporal_update",
    "update",
    "update_jacobian",
    "verify_placed_capacity",
]
