"""Faber-Schauder coefficient estimation from samples of an antiderivative."""

from .estimator import (
    EstimateResult,
    PiecewiseLinearFn,
    PiecewiseQuadraticFn,
    SampleVector,
    estimate,
    estimate_via_linear_solve,
    reconstruct_F,
    reconstruct_f,
    roughness_from_true_coeffs,
    roughness_robust,
    truncate,
)
from .exceptions import (
    ConditioningError,
    ConvergenceError,
    SingularMatrixError,
    UndefinedEstimateError,
    ValidationError,
)
from .faber import (
    BasisIndex,
    CoeffSet,
    DyadicIndex,
    coeffs_from_function,
    eval_e,
    eval_expansion,
    eval_psi,
    second_order_modulus,
)
from .generators import FunctionSpec, TakagiSpec, sample_F

__all__ = [
    "BasisIndex",
    "CoeffSet",
    "ConditioningError",
    "ConvergenceError",
    "DyadicIndex",
    "EstimateResult",
    "FunctionSpec",
    "PiecewiseLinearFn",
    "PiecewiseQuadraticFn",
    "SampleVector",
    "SingularMatrixError",
    "TakagiSpec",
    "UndefinedEstimateError",
    "ValidationError",
    "coeffs_from_function",
    "estimate",
    "estimate_via_linear_solve",
    "eval_e",
    "eval_expansion",
    "eval_psi",
    "reconstruct_F",
    "reconstruct_f",
    "roughness_from_true_coeffs",
    "roughness_robust",
    "sample_F",
    "second_order_modulus",
    "truncate",
]
