"""SCAD penalty, its proximal operators, and the composite gradient mapping.

The regularizer attached to a rule point is
    g(omega, c) = sum_t p_lambda1(|omega_t|) + lambda2 * c^2,
with p_lambda the SCAD penalty at level lambda1 and shape a. Both pieces
are separable, so prox_g is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HyperParams, RulePoint, ValidationError
from .objective import ObjectiveContext, smooth_grad


@dataclass(frozen=True)
class ScadParams:
    lam: float
    a: float = 3.7

    def __post_init__(self):
        if self.lam < 0:
            raise ValidationError("lambda must be nonnegative")
        if self.a <= 2:
            raise ValidationError("shape a must exceed 2")


def scad_value(x: float, params: ScadParams) -> float:
    """SCAD penalty value at x >= 0: linear, then quadratic, then flat."""
    if x < 0:
        raise ValidationError("scad_value expects x >= 0 (pass |omega_t|)")
    lam, a = params.lam, params.a
    if x <= lam:
        return lam * x
    if x <= a * lam:
        return (2.0 * a * lam * x - x * x - lam * lam) / (2.0 * (a - 1.0))
    return lam * lam * (a + 1.0) / 2.0


def scad_value_vec(x: np.ndarray, params: ScadParams) -> np.ndarray:
    lam, a = params.lam, params.a
    x = np.asarray(x, dtype=np.float64)
    mid = (2.0 * a * lam * x - x * x - lam * lam) / (2.0 * (a - 1.0))
    return np.where(x <= lam, lam * x, np.where(x <= a * lam, mid, lam * lam * (a + 1.0) / 2.0))


def scad_derivative(x: float, params: ScadParams) -> float:
    """p'_lambda: 0 at 0, lambda on (0, lambda], linear decay to 0 at a*lambda."""
    if x < 0:
        raise ValidationError("scad_derivative expects x >= 0")
    lam, a = params.lam, params.a
    if x == 0.0:
        return 0.0
    if x <= lam:
        return lam
    return max(a * lam - x, 0.0) / (a - 1.0)


def _prox_objective(z, x, step, params):
    return (z - x) ** 2 / (2.0 * step) + scad_value_vec(np.abs(z), params)


def scad_prox(x: float, step: float, params: ScadParams) -> float:
    """argmin_z (z-x)^2/(2*step) + p_lambda(|z|), exact."""
    return float(scad_prox_vec(np.array([x]), step, params)[0])


def scad_prox_vec(x: np.ndarray, step: float, params: ScadParams) -> np.ndarray:
    """Vectorized SCAD prox over coordinates."""
    if step <= 0:
        raise ValidationError("step must be positive")
    lam, a = params.lam, params.a
    x = np.asarray(x, dtype=np.float64)
    if lam == 0.0:
        return x.copy()

    sign = np.sign(x)
    ax = np.abs(x)
    if step < a - 1.0:
        # Closed form, valid while every piece of the prox objective is convex.
        soft = sign * np.maximum(ax - step * lam, 0.0)
        mid = ((a - 1.0) * x - sign * a * step * lam) / (a - 1.0 - step)
        return np.where(
            ax <= lam * (1.0 + step), soft, np.where(ax <= a * lam, mid, x)
        )

    # Large steps: the middle piece loses convexity; enumerate the candidate
    # stationary points of each piece plus the breakpoints and pick the best.
    soft = sign * np.maximum(ax - step * lam, 0.0)
    cands = [np.zeros_like(x), soft, x, sign * lam, sign * (a * lam)]
    if abs(a - 1.0 - step) > 1e-15:
        mid = ((a - 1.0) * x - sign * a * step * lam) / (a - 1.0 - step)
        cands.append(np.clip(np.abs(mid), lam, a * lam) * np.sign(mid))
    stacked = np.stack(cands)
    values = _prox_objective(stacked, x, step, params)
    return stacked[np.argmin(values, axis=0), np.arange(x.size)]


def prox_g(v: RulePoint, step: float, hyper: HyperParams) -> RulePoint:
    """Proximal map of step*g: SCAD prox on omega, ridge prox on the cutoff."""
    if step <= 0:
        raise ValidationError("step must be positive")
    params = ScadParams(hyper.lambda1, hyper.scad_a)
    omega = scad_prox_vec(v.omega, step, params)
    cutoff = v.cutoff / (1.0 + 2.0 * step * hyper.lambda2)
    return RulePoint(omega=omega, cutoff=cutoff)


def g_value(v: RulePoint, hyper: HyperParams) -> float:
    """Value of the regularizer at a rule point."""
    params = ScadParams(hyper.lambda1, hyper.scad_a)
    return float(
        scad_value_vec(np.abs(v.omega), params).sum() + hyper.lambda2 * v.cutoff**2
    )


def gradient_mapping(
    v: RulePoint, tilde_t: float, ctx: ObjectiveContext, hyper: HyperParams
) -> np.ndarray:
    """G_t(v) = (v - prox_{t g}(v - t grad f(v))) / t."""
    if tilde_t <= 0:
        raise ValidationError("tilde_t must be positive")
    vec = v.as_vector()
    stepped = RulePoint.from_vector(vec - tilde_t * smooth_grad(v, ctx))
    return (vec - prox_g(stepped, tilde_t, hyper).as_vector()) / tilde_t


def stationarity_residual(
    v: RulePoint, ctx: ObjectiveContext, hyper: HyperParams
) -> float:
    """||v - prox_g(v - grad f(v), 1)||, i.e. ||G_1(v)||."""
    return float(np.linalg.norm(gradient_mapping(v, 1.0, ctx, hyper)))
