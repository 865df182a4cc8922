"""End-to-end estimation: bandwidth rule, initialization, cross-validation
over the penalty grid, solving, and metric evaluation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import BiomarkerDataset, EvalMetrics, HyperParams, RulePoint, ValidationError
from .objective import ObjectiveContext, best_cutoff_scan, empirical_weighted_youden
from .penalty import stationarity_residual
from .solver import SolverConfig, SolverTrace, solve, solve_backtracking, solve_papg

DEFAULT_LAMBDA_GRID = (10.0, 5.0, 1.0, 0.5, 0.1, 0.05, 0.01, 0.005)
DEFAULT_LAMBDA2 = 1e-6
DEFAULT_SCAD_A = 3.7
ZERO_SNAP = 1e-8
PILOT_L1_LAMBDA = 0.01

_SOLVERS = {
    "napg_poly": solve,
    "napg_backtracking": solve_backtracking,
    "papg": solve_papg,
}


@dataclass(frozen=True)
class FitOptions:
    bandwidth: Optional[float] = None
    lambda1: Optional[float] = None
    lambda2: float = DEFAULT_LAMBDA2
    scad_a: float = DEFAULT_SCAD_A
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID
    folds: int = 5
    seed: int = 0
    solver: str = "napg_poly"
    solver_config: SolverConfig = field(default_factory=SolverConfig)


@dataclass(frozen=True)
class FitResult:
    rule: RulePoint
    lambda_selected: float
    trace: SolverTrace
    train_metrics: EvalMetrics
    cv_table: tuple[tuple[float, float], ...]
    degenerate: bool
    pi: float
    bandwidth: float
    method: str = "scad_youden"

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "omega": [float(x) for x in self.rule.omega],
            "cutoff": float(self.rule.cutoff),
            "lambda": float(self.lambda_selected),
            "pi": float(self.pi),
            "h": None if np.isnan(self.bandwidth) else float(self.bandwidth),
            "metrics": self.train_metrics.to_dict(),
            "cv_table": [[float(l), float(j)] for l, j in self.cv_table],
            "degenerate": bool(self.degenerate),
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def default_bandwidth(n1: int, n0: int) -> float:
    """Smoothing bandwidth (n1*n0)^(-0.1)."""
    return float((n1 * n0) ** -0.1)


def _pilot_start(data: BiomarkerDataset, hyper: HyperParams) -> Optional[RulePoint]:
    """L1-logistic pilot direction for high-dimensional starts.

    Returns None when the pilot shrinks every coefficient to zero, in which
    case the caller falls back to the mean-difference rule.
    """
    # Deferred import: baseline imports this module at load time.
    from .baseline import _fit_logistic

    model, _ = _fit_logistic(data, PILOT_L1_LAMBDA, SolverConfig())
    norm = float(np.linalg.norm(model.coefficients))
    if norm == 0.0:
        return None
    omega = model.coefficients / norm
    cutoff, _ = best_cutoff_scan(data.diseased @ omega, data.healthy @ omega,
                                 hyper.pi)
    return RulePoint(omega=omega, cutoff=cutoff)


def initialize(data: BiomarkerDataset, hyper: HyperParams) -> RulePoint:
    """Starting rule for the solver.

    Default is the mean-difference start: unit-norm class-mean gap, midpoint
    cutoff. When the biomarker count exceeds half the sample size the
    coordinate-wise sampling noise swamps the class-mean gap, so an
    L1-logistic pilot fit supplies the starting direction instead.
    """
    if 2 * data.p > data.n1 + data.n0:
        pilot = _pilot_start(data, hyper)
        if pilot is not None:
            return pilot
    mu_d = data.diseased.mean(axis=0)
    mu_h = data.healthy.mean(axis=0)
    diff = mu_d - mu_h
    norm = float(np.linalg.norm(diff))
    if norm == 0.0:
        omega = np.zeros(data.p)
        omega[0] = 1.0
    else:
        omega = diff / norm
    cutoff = float(omega @ (mu_d + mu_h) / 2.0)
    return RulePoint(omega=omega, cutoff=cutoff)


def normalize_rule(v: RulePoint) -> tuple[RulePoint, bool]:
    """Rescale to unit-norm weights; returns (rule, degenerate_flag)."""
    norm = float(np.linalg.norm(v.omega))
    if norm == 0.0:
        return v, True
    return RulePoint(omega=v.omega / norm, cutoff=v.cutoff / norm), False


def _snap_zeros(v: RulePoint) -> RulePoint:
    omega = np.where(np.abs(v.omega) < ZERO_SNAP, 0.0, v.omega)
    return RulePoint(omega=omega, cutoff=v.cutoff)


def _fit_single(
    train: BiomarkerDataset, pi: float, lambda1: float, options: FitOptions
) -> FitResult:
    h = options.bandwidth or default_bandwidth(train.n1, train.n0)
    hyper = HyperParams(pi=pi, bandwidth=h, lambda1=lambda1,
                        lambda2=options.lambda2, scad_a=options.scad_a)
    ctx = ObjectiveContext(data=train, pi=pi, bandwidth=h)
    init = initialize(train, hyper)
    solver = _SOLVERS[options.solver]
    fitted, trace, _reason = solver(init, ctx, hyper, options.solver_config)
    rule, degenerate = normalize_rule(_snap_zeros(fitted))
    metrics = empirical_weighted_youden(rule, train, pi)
    return FitResult(
        rule=rule, lambda_selected=lambda1, trace=trace, train_metrics=metrics,
        cv_table=(), degenerate=degenerate, pi=pi, bandwidth=h,
    )


def _fold_indices(n: int, folds: int, rng) -> list[np.ndarray]:
    perm = rng.permutation(n)
    return [np.sort(part) for part in np.array_split(perm, folds)]


def cross_validate(
    train: BiomarkerDataset,
    pi: float,
    lambda_grid: Sequence[float],
    folds: int,
    seed: int,
    options: FitOptions = FitOptions(),
) -> tuple[float, tuple[tuple[float, float], ...]]:
    """Stratified k-fold selection of the SCAD penalty weight.

    For each lambda the model is refit on k-1 folds and scored by the
    empirical weighted Youden index of the normalized rule on the held-out
    fold; ties go to the larger lambda (sparser panels).
    """
    if folds < 2:
        raise ValidationError("folds must be at least 2")
    if train.n1 < folds or train.n0 < folds:
        raise ValidationError("each class needs at least `folds` rows")

    rng = np.random.default_rng(seed)
    folds_d = _fold_indices(train.n1, folds, rng)
    folds_h = _fold_indices(train.n0, folds, rng)

    grid = sorted(set(float(l) for l in lambda_grid), reverse=True)
    means = []
    for lam in grid:
        scores = []
        for f in range(folds):
            mask_d = np.ones(train.n1, dtype=bool)
            mask_d[folds_d[f]] = False
            mask_h = np.ones(train.n0, dtype=bool)
            mask_h[folds_h[f]] = False
            sub = BiomarkerDataset(train.diseased[mask_d], train.healthy[mask_h],
                                   train.feature_names)
            held = BiomarkerDataset(train.diseased[~mask_d], train.healthy[~mask_h],
                                    train.feature_names)
            res = _fit_single(sub, pi, lam, options)
            scores.append(empirical_weighted_youden(res.rule, held, pi).weighted_youden)
        means.append(float(np.mean(scores)))

    best = int(np.argmax(means))  # grid is descending, so ties pick the larger lambda
    table = tuple(zip(grid, means))
    return grid[best], table


def fit(train: BiomarkerDataset, pi: float, options: FitOptions = FitOptions()) -> FitResult:
    """Full pipeline: bandwidth, CV over the penalty grid, solve, normalize."""
    if not 0.0 < pi < 1.0:
        raise ValidationError(f"pi must be in (0,1), got {pi}")
    cv_table = ()
    lambda1 = options.lambda1
    if lambda1 is None:
        lambda1, cv_table = cross_validate(
            train, pi, options.lambda_grid, options.folds, options.seed, options
        )
    result = _fit_single(train, pi, lambda1, options)
    return replace(result, cv_table=cv_table)


def evaluate(
    rule: RulePoint,
    test: BiomarkerDataset,
    pi: float,
    truth=None,
) -> EvalMetrics:
    """Metrics of a fitted rule on held-out data, optionally against truth.

    Detection rate counts truly nonzero coefficients estimated nonzero;
    shrinkage accuracy counts truly zero coefficients estimated exactly zero
    (after the fitting pipeline's zero snap).
    """
    metrics = empirical_weighted_youden(rule, test, pi)
    if truth is None:
        return metrics
    truth = np.asarray(truth, dtype=np.float64)
    if truth.shape != rule.omega.shape:
        raise ValidationError("truth vector length must equal p")
    est_nonzero = rule.omega != 0.0
    true_nonzero = truth != 0.0
    detection = float(np.mean(est_nonzero[true_nonzero])) if true_nonzero.any() else None
    shrinkage = float(np.mean(~est_nonzero[~true_nonzero])) if (~true_nonzero).any() else None
    return replace(metrics, detection_rate=detection, shrinkage_accuracy=shrinkage)
