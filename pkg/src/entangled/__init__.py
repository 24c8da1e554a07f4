"""Mean estimation from entangled single-sample Gaussians: the
iterative-truncation estimator, two-point lower-bound experiments and the
closed-form Gaussian integrals behind them."""

from .core import (
    GaussianInstance,
    IterationTrace,
    SampleSet,
    StageTrace,
    TruncationSchedule,
    build_schedule,
    default_initialization,
    truncate,
)
from .errors import (
    DegenerateFitError,
    DomainError,
    EmptyInputError,
    EntangledError,
    InvalidIntervalError,
    NumericalError,
    QuadratureError,
    ScheduleOverflowError,
)
from .estimators import (
    EstimateResult,
    estimate_iterative_truncation,
    estimate_median,
    estimate_sample_mean,
)
from .instances import (
    NoiseConfig,
    TwoPointPrior,
    case1_params,
    case2_params,
    generate_subset_of_signals,
    sample_prior_instance,
)
from .lowerbound import (
    exact_group_moments,
    log_likelihood_ratio,
    moment_diagnostics,
    run_sign_error_experiment,
    taylor_Y,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateFitError",
    "DomainError",
    "EmptyInputError",
    "EntangledError",
    "EstimateResult",
    "GaussianInstance",
    "InvalidIntervalError",
    "IterationTrace",
    "NoiseConfig",
    "NumericalError",
    "QuadratureError",
    "SampleSet",
    "ScheduleOverflowError",
    "StageTrace",
    "TruncationSchedule",
    "TwoPointPrior",
    "build_schedule",
    "case1_params",
    "case2_params",
    "default_initialization",
    "estimate_iterative_truncation",
    "estimate_median",
    "estimate_sample_mean",
    "exact_group_moments",
    "generate_subset_of_signals",
    "log_likelihood_ratio",
    "moment_diagnostics",
    "run_sign_error_experiment",
    "sample_prior_instance",
    "taylor_Y",
    "truncate",
]
