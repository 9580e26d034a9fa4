"""Learning regularization strengths for inverse problems.

The package splits into reusable pieces (operators, spectral filters,
variational solvers, grid-based selection, closed-form bounds) and the
experiments subpackage that wires them into reproducible studies.
"""

from .bounds import (
    BoundParams,
    convex_bound,
    convex_optimal,
    cq_factor,
    effective_alpha,
    erm_bound,
    hoeffding_bound,
    nonlinear_bound,
    nonlinear_optimal,
    spectral_bound,
    spectral_optimal,
)
from .operators import (
    ConvolutionOperator,
    DenseOperator,
    GradientOperator,
    IdentityOperator,
    SpectralDecomposition,
    fractional_power_apply,
    gaussian_deriv2_kernel,
    gradient_adjoint,
    image_gradient,
)
from .selection import (
    L1BregmanLoss,
    ParamGrid,
    TrainingSet,
    TruncatedSquaredLoss,
    TvBregmanLoss,
    empirical_risk,
    erm_select,
    geometric_grid,
    oracle_select,
    quasi_optimality_landweber,
    quasi_optimality_tikhonov,
    risk_curve,
)
from .spectral import (
    Landweber,
    SpectralCutoff,
    Tikhonov,
    landweber_iterations,
    landweber_solve,
    spectral_filter_solve,
    tikhonov_solve,
    truncate,
    truncated_sq_loss,
)
from .variational import (
    ConvergenceError,
    SolverConfig,
    bregman_l1,
    bregman_tv,
    l1_subgradient,
    lasso_solve,
    regularization_path,
    soft_threshold,
    total_variation,
    tv_denoise,
)

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "ConvergenceError",
    "ConvolutionOperator",
    "DenseOperator",
    "GradientOperator",
    "IdentityOperator",
    "L1BregmanLoss",
    "Landweber",
    "ParamGrid",
    "SolverConfig",
    "SpectralCutoff",
    "SpectralDecomposition",
    "Tikhonov",
    "TrainingSet",
    "TruncatedSquaredLoss",
    "TvBregmanLoss",
    "bregman_l1",
    "bregman_tv",
    "convex_bound",
    "convex_optimal",
    "cq_factor",
    "effective_alpha",
    "empirical_risk",
    "erm_bound",
    "erm_select",
    "fractional_power_apply",
    "gaussian_deriv2_kernel",
    "geometric_grid",
    "gradient_adjoint",
    "hoeffding_bound",
    "image_gradient",
    "l1_subgradient",
    "landweber_iterations",
    "landweber_solve",
    "lasso_solve",
    "nonlinear_bound",
    "nonlinear_optimal",
    "oracle_select",
    "quasi_optimality_landweber",
    "quasi_optimality_tikhonov",
    "regularization_path",
    "risk_curve",
    "soft_threshold",
    "spectral_bound",
    "spectral_filter_solve",
    "spectral_optimal",
    "tikhonov_solve",
    "total_variation",
    "truncate",
    "truncated_sq_loss",
    "tv_denoise",
    "__version__",
]
