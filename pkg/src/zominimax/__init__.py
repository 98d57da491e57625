"""Zeroth-order solvers for nonconvex-strongly-concave minimax problems."""

from ._backend import USING_NUMBA, backend_name
from .errors import (
    ConfigError,
    DivergenceError,
    EvaluationError,
    InnerSolveError,
    NumericalError,
)
from .geometry import (
    Box,
    ConstraintSet,
    EuclideanBall,
    WholeSpace,
    constraint_set_from_config,
)
from .problems import (
    MinimaxProblem,
    OracleCounter,
    QuadraticSaddle,
    StochasticWrapper,
    TrigSaddle,
    analytic_grad_g,
    analytic_y_star,
    eval_problem,
    eval_stochastic,
    make_quadratic,
    make_trig,
)
from .smoothing import (
    GradientEstimate,
    SmoothingConfig,
    estimate_gx,
    estimate_gx_stochastic,
    estimate_gy,
    estimate_gy_stochastic,
    smoothed_grad_x,
    smoothed_grad_y,
    smoothed_value_x,
    smoothed_value_y,
)
from .solvers import (
    MODES,
    DerivedParams,
    Overrides,
    RunTrace,
    derive_params,
    run_zo_gda,
    run_zo_gdmsa,
    run_zo_sgda,
    run_zo_sgdmsa,
    zo_inner_ascent,
    zo_inner_ascent_stochastic,
)
from .stationarity import (
    StationarityReport,
    iterations_to_target,
    measure_grad_g,
    measure_trace,
    recover_pair,
    solve_inner_max,
)

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA",
    "backend_name",
    "ConfigError",
    "DivergenceError",
    "EvaluationError",
    "InnerSolveError",
    "NumericalError",
    "Box",
    "ConstraintSet",
    "EuclideanBall",
    "WholeSpace",
    "constraint_set_from_config",
    "MinimaxProblem",
    "OracleCounter",
    "QuadraticSaddle",
    "StochasticWrapper",
    "TrigSaddle",
    "analytic_grad_g",
    "analytic_y_star",
    "eval_problem",
    "eval_stochastic",
    "make_quadratic",
    "make_trig",
    "GradientEstimate",
    "SmoothingConfig",
    "estimate_gx",
    "estimate_gx_stochastic",
    "estimate_gy",
    "estimate_gy_stochastic",
    "smoothed_grad_x",
    "smoothed_grad_y",
    "smoothed_value_x",
    "smoothed_value_y",
    "MODES",
    "DerivedParams",
    "Overrides",
    "RunTrace",
    "derive_params",
    "run_zo_gda",
    "run_zo_gdmsa",
    "run_zo_sgda",
    "run_zo_sgdmsa",
    "zo_inner_ascent",
    "zo_inner_ascent_stochastic",
    "StationarityReport",
    "iterations_to_target",
    "measure_grad_g",
    "measure_trace",
    "recover_pair",
    "solve_inner_max",
]
