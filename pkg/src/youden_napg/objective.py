"""Smoothed data-fitting term, its analytic gradient, and indicator-based
weighted Youden evaluation.

The smoothed term is the minimization form
    f(omega, c) = pi * mean_i Phi((c - omega.X_i)/h)
                - (1-pi) * mean_j Phi((c - omega.Y_j)/h),
so f in [-(1-pi), pi]. The reported weighted Youden index relates to the
maximization form by J = -2*f + 2*pi - 1 at the empirical level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import BiomarkerDataset, EvalMetrics, RulePoint, ValidationError


@dataclass(frozen=True)
class ObjectiveContext:
    """Binds a dataset to the sensitivity weight and bandwidth."""

    data: BiomarkerDataset
    pi: float
    bandwidth: float

    def __post_init__(self):
        if not 0.0 < self.pi < 1.0:
            raise ValidationError(f"pi must be in (0,1), got {self.pi}")
        if self.bandwidth <= 0:
            raise ValidationError("bandwidth must be positive")


def _check_dim(v: RulePoint, p: int):
    if v.p != p:
        raise ValidationError(f"rule has {v.p} weights but data has {p} features")


def smooth_f(v: RulePoint, ctx: ObjectiveContext) -> float:
    """Smoothed data term in minimization form."""
    _check_dim(v, ctx.data.p)
    return kernels.smooth_f_raw(
        ctx.data.diseased, ctx.data.healthy, v.omega, v.cutoff, ctx.pi, ctx.bandwidth
    )


def smooth_grad(v: RulePoint, ctx: ObjectiveContext) -> np.ndarray:
    """Exact gradient of smooth_f; entries [d/d omega_1..p, d/dc]."""
    _check_dim(v, ctx.data.p)
    return kernels.smooth_grad_raw(
        ctx.data.diseased, ctx.data.healthy, v.omega, v.cutoff, ctx.pi, ctx.bandwidth
    )


def empirical_weighted_youden(
    v: RulePoint, data: BiomarkerDataset, pi: float
) -> EvalMetrics:
    """Indicator-based metrics of a rule: Se uses strict >, Sp uses <=."""
    _check_dim(v, data.p)
    se = float(np.mean(data.diseased @ v.omega > v.cutoff))
    sp = float(np.mean(data.healthy @ v.omega <= v.cutoff))
    return EvalMetrics(
        weighted_youden=2.0 * (pi * se + (1.0 - pi) * sp) - 1.0,
        sensitivity=se,
        specificity=sp,
        nonzero_count=int(np.count_nonzero(v.omega)),
    )


def best_cutoff_scan(scores_diseased, scores_healthy, pi: float) -> tuple[float, float]:
    """Maximize the empirical weighted Youden index over cutoffs for fixed scores.

    Candidate cutoffs are midpoints between consecutive distinct pooled
    scores plus one sentinel below the minimum and one above the maximum.
    Ties are broken toward the smallest cutoff. O((n0+n1) log(n0+n1)).
    """
    sd = np.asarray(scores_diseased, dtype=np.float64)
    sh = np.asarray(scores_healthy, dtype=np.float64)
    if sd.size == 0 or sh.size == 0:
        raise ValidationError("score lists must be non-empty")

    pooled = np.unique(np.concatenate([sd, sh]))
    candidates = np.empty(pooled.size + 1)
    candidates[0] = pooled[0] - 1.0
    candidates[-1] = pooled[-1] + 1.0
    if pooled.size > 1:
        candidates[1:-1] = 0.5 * (pooled[:-1] + pooled[1:])

    sd_sorted = np.sort(sd)
    sh_sorted = np.sort(sh)
    # Se(c) = #{diseased > c}/n1, Sp(c) = #{healthy <= c}/n0
    se = (sd.size - np.searchsorted(sd_sorted, candidates, side="right")) / sd.size
    sp = np.searchsorted(sh_sorted, candidates, side="right") / sh.size
    j = 2.0 * (pi * se + (1.0 - pi) * sp) - 1.0
    best = int(np.argmax(j))  # argmax returns the first (smallest) maximizer
    return float(candidates[best]), float(j[best])
