from .bias import (
    BiasQuery,
    bias_bound,
    bias_bound_check,
    bias_grid,
    harmonic_mean_clamped,
    m_of_delta,
    normal_cdf,
    truncated_mean_expectation,
)
from .quadrature import QuadratureSpec, quadrature
from .toolbox import BOUND_KINDS, KINDS, integrand_for, toolbox_integral
from .verify import ToolboxCheck, check_kind, truncated_mean_by_quadrature, verify_toolbox

__all__ = [
    "BOUND_KINDS",
    "BiasQuery",
    "KINDS",
    "QuadratureSpec",
    "ToolboxCheck",
    "bias_bound",
    "bias_bound_check",
    "bias_grid",
    "check_kind",
    "harmonic_mean_clamped",
    "integrand_for",
    "m_of_delta",
    "normal_cdf",
    "quadrature",
    "toolbox_integral",
    "truncated_mean_by_quadrature",
    "truncated_mean_expectation",
    "verify_toolbox",
]
