"""Sparse biomarker selection and combination by maximizing a smoothed,
SCAD-penalized weighted Youden index."""

from .core import (
    BiomarkerDataset,
    EvalMetrics,
    HyperParams,
    IngestionError,
    RulePoint,
    ValidationError,
    load_dataset,
    save_dataset,
    split_train_test,
)
from .kernels import BACKEND
from .objective import (
    ObjectiveContext,
    best_cutoff_scan,
    empirical_weighted_youden,
    smooth_f,
    smooth_grad,
)
from .penalty import (
    ScadParams,
    gradient_mapping,
    prox_g,
    scad_derivative,
    scad_prox,
    scad_value,
    stationarity_residual,
)
from .pipeline import (
    FitOptions,
    FitResult,
    cross_validate,
    default_bandwidth,
    evaluate,
    fit,
    initialize,
    normalize_rule,
)
from .solver import (
    CompositeProblem,
    SolverConfig,
    SolverTrace,
    bb_step,
    minimize,
    poly_linesearch,
    solve,
    solve_backtracking,
    solve_papg,
)

__version__ = "0.1.0"
