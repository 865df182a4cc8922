"""Nonmonotone accelerated proximal gradient solvers.

Three variants over the composite objective F = f + g:

* ``solve``              - nonmonotone APG with alternating Barzilai-Borwein
                           initial steps and polynomial-interpolation line
                           search (the default method),
* ``solve_backtracking`` - same outer loop, step-halving line search,
* ``solve_papg``         - monotone APG with a fixed step and restarts.

The solvers operate on plain vectors through a :class:`CompositeProblem`;
rule-point wrappers bind them to the smoothed Youden objective.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .core import HyperParams, RulePoint, ValidationError
from .objective import ObjectiveContext, smooth_f, smooth_grad
from .penalty import g_value, prox_g  # noqa: F401  (rule-point API re-exported for callers)


@dataclass(frozen=True)
class SolverConfig:
    """Algorithm constants; defaults follow common nonmonotone-BB practice."""

    eta: float = 0.8
    delta: float = 1e-4
    c1: float = 1e-4
    tau1: float = 0.1
    tau2: float = 0.9
    alpha_min: float = 1e-10
    alpha_max: float = 1e10
    max_iter: int = 5000
    max_ls_iter: int = 30
    tol_residual: float = 1e-6
    tol_f_rel: float = 1e-10
    variant: str = "napg_poly"
    fixed_step: float = 1.0
    record_points: bool = False

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValidationError("eta must lie in [0, 1]")
        if self.delta <= 0:
            raise ValidationError("delta must be positive")
        if not 0.0 < self.c1 < 1.0:
            raise ValidationError("c1 must lie in (0, 1)")
        if not 0.0 < self.tau1 <= self.tau2 < 1.0:
            raise ValidationError("need 0 < tau1 <= tau2 < 1")
        if not 0.0 < self.alpha_min <= self.alpha_max:
            raise ValidationError("need 0 < alpha_min <= alpha_max")
        if self.variant not in ("napg_poly", "napg_backtracking", "papg"):
            raise ValidationError(f"unknown variant {self.variant!r}")


@dataclass(frozen=True)
class CompositeProblem:
    """F(x) = f(x) + g(x) with smooth f and prox-friendly g."""

    f: Callable[[np.ndarray], float]
    grad_f: Callable[[np.ndarray], np.ndarray]
    g: Callable[[np.ndarray], float]
    prox: Callable[[np.ndarray, float], np.ndarray]

    def F(self, x: np.ndarray) -> float:
        return self.f(x) + self.g(x)


def make_youden_problem(ctx: ObjectiveContext, hyper: HyperParams) -> CompositeProblem:
    """Composite problem for the smoothed, SCAD-penalized Youden objective.

    Works on raw [omega, c] vectors to keep per-evaluation overhead low.
    """
    from . import kernels
    from .penalty import ScadParams, scad_prox_vec, scad_value_vec

    X, Y = ctx.data.diseased, ctx.data.healthy
    pi, h = ctx.pi, ctx.bandwidth
    params = ScadParams(hyper.lambda1, hyper.scad_a)
    lam2 = hyper.lambda2

    def f(x):
        return kernels.smooth_f_raw(X, Y, x[:-1], x[-1], pi, h)

    def grad_f(x):
        return kernels.smooth_grad_raw(X, Y, x[:-1], x[-1], pi, h)

    def g(x):
        return float(scad_value_vec(np.abs(x[:-1]), params).sum()) + lam2 * x[-1] ** 2

    def prox(x, t):
        out = np.empty_like(x)
        out[:-1] = scad_prox_vec(x[:-1], t, params)
        out[-1] = x[-1] / (1.0 + 2.0 * t * lam2)
        return out

    return CompositeProblem(f=f, grad_f=grad_f, g=g, prox=prox)


@dataclass(frozen=True)
class SearchOutcome:
    """One line search: accepted (or best fallback) step and its audit data."""

    alpha: float
    point: np.ndarray
    h_alpha: float
    grad_map_sq: float
    f_evals: int
    accept_kind: Optional[str]  # None when the search was exhausted
    accept_rhs: float
    proposals: tuple  # (alpha_i, alpha_proposed, alpha_safeguarded) per failure
    flagged: bool
    anchor: Optional[np.ndarray] = None


@dataclass(frozen=True)
class IterationRecord:
    k: int
    f_value: float
    residual: float
    cum_f_evals: int
    cum_grad_evals: int
    step: float
    branch: str
    c_avg: float = math.nan
    flagged: bool = False
    searches: tuple = ()


@dataclass
class SolverTrace:
    records: list[IterationRecord] = field(default_factory=list)

    def append(self, rec: IterationRecord):
        self.records.append(rec)

    def f_values(self) -> np.ndarray:
        return np.array([r.f_value for r in self.records])

    def residuals(self) -> np.ndarray:
        return np.array([r.residual for r in self.records])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["iter", "f_value", "residual", "cum_f_evals", "cum_grad_evals", "step", "branch"]
            )
            for r in self.records:
                writer.writerow(
                    [r.k, repr(r.f_value), repr(r.residual), r.cum_f_evals,
                     r.cum_grad_evals, repr(r.step), r.branch]
                )


@dataclass(frozen=True)
class SolverResult:
    point: np.ndarray
    f_value: float
    trace: SolverTrace
    reason: str


def momentum_update(t: float) -> float:
    """Next extrapolation coefficient: (sqrt(4 t^2 + 1) + 1) / 2."""
    return (math.sqrt(4.0 * t * t + 1.0) + 1.0) / 2.0


def average_update(c_avg: float, q: float, f_next: float, eta: float) -> tuple[float, float]:
    """Weighted-average bookkeeping: q' = eta*q + 1, c' = (eta*q*c + F)/q'."""
    q_next = eta * q + 1.0
    return (eta * q * c_avg + f_next) / q_next, q_next


def bb_step(s: np.ndarray, r: np.ndarray, iteration_parity: int, config: SolverConfig) -> float:
    """Alternating Barzilai-Borwein step, clamped to [alpha_min, alpha_max].

    Odd parity uses |s.s|/|s.r|, even parity |s.r|/|r.r|; a zero denominator
    falls back to alpha_min.
    """
    if iteration_parity % 2 == 1:
        num, den = abs(float(s @ s)), abs(float(s @ r))
    else:
        num, den = abs(float(s @ r)), abs(float(r @ r))
    if den == 0.0:
        return config.alpha_min
    return float(min(max(num / den, config.alpha_min), config.alpha_max))


def quadratic_interp_step(h0: float, hp0: float, alpha1: float, h1: float) -> float:
    """Minimizer of the quadratic model through h(0), h'(0), h(alpha1)."""
    denom = 2.0 * (h1 - h0 - hp0 * alpha1)
    if denom <= 0.0 or not math.isfinite(denom):
        return math.nan
    return -hp0 * alpha1 * alpha1 / denom


def cubic_interp_step(
    h0: float, hp0: float, alpha1: float, h1: float, alpha2: float, h2: float
) -> float:
    """Minimizer of the cubic model through h(0), h'(0), h(alpha1), h(alpha2)."""
    if alpha1 == alpha2 or alpha1 == 0.0 or alpha2 == 0.0:
        return math.nan
    d1 = h1 - h0 - hp0 * alpha1
    d2 = h2 - h0 - hp0 * alpha2
    inv = 1.0 / (alpha1 - alpha2)
    a = inv * (d1 / alpha1**2 - d2 / alpha2**2)
    b = inv * (-alpha2 * d1 / alpha1**2 + alpha1 * d2 / alpha2**2)
    if a == 0.0:
        # Cubic coefficient vanishes: the model is the quadratic one.
        if b <= 0.0:
            return math.nan
        return -hp0 / (2.0 * b)
    disc = b * b - 3.0 * a * hp0
    if disc < 0.0 or not math.isfinite(disc):
        return math.nan
    denom = b + math.sqrt(disc)
    if denom == 0.0:
        return math.nan
    # (-b + sqrt(disc)) / (3a) in a cancellation-free form
    return -hp0 / denom


class _Counted:
    """Wraps a problem with F/gradient evaluation counters."""

    def __init__(self, problem: CompositeProblem):
        self.problem = problem
        self.f_evals = 0
        self.grad_evals = 0

    def F(self, x) -> float:
        self.f_evals += 1
        return self.problem.F(x)

    def grad(self, x) -> np.ndarray:
        self.grad_evals += 1
        return self.problem.grad_f(x)

    def residual(self, x) -> float:
        # Diagnostic stationarity residual ||G_1(x)||; its gradient is not
        # charged to the evaluation counters.
        g = self.problem.grad_f(x)
        return float(np.linalg.norm(x - self.problem.prox(x - g, 1.0)))


def _line_search(
    counted: _Counted,
    anchor: np.ndarray,
    grad_anchor: np.ndarray,
    h0: float,
    alpha0: float,
    accept_test: Callable[[np.ndarray, float, float], Optional[tuple[str, float]]],
    config: SolverConfig,
    mode: str,
    keep_anchor: bool = False,
) -> SearchOutcome:
    """Backtracking loop shared by the poly and step-halving variants.

    The trial point at step alpha is prox_{alpha g}(anchor - alpha grad f);
    h(alpha) is F there, and -||G_alpha(anchor)||^2 (recomputed at each
    trial) approximates h'(0) in the interpolation models. Every proposal is
    safeguarded into [tau1*alpha, tau2*alpha]. On exhaustion the best
    (lowest-F) candidate is returned, flagged.
    """
    if not (alpha0 > 0 and math.isfinite(h0)):
        raise ValidationError("line search needs a positive step and finite F(anchor)")

    alpha = alpha0
    prev_alpha = prev_h = None
    best = None  # (h, alpha, point, Gsq)
    proposals = []
    f_evals = 0
    stored_anchor = anchor.copy() if keep_anchor else None

    for i in range(config.max_ls_iter):
        cand = counted.problem.prox(anchor - alpha * grad_anchor, alpha)
        gmap = (anchor - cand) / alpha
        gsq = float(gmap @ gmap)
        h_alpha = counted.F(cand)
        f_evals += 1
        finite = math.isfinite(h_alpha)

        if finite:
            verdict = accept_test(cand, alpha, h_alpha)
            if verdict is not None:
                kind, rhs = verdict
                return SearchOutcome(
                    alpha, cand, h_alpha, gsq, f_evals, kind, rhs,
                    tuple(proposals), False, stored_anchor,
                )
            if best is None or h_alpha < best[0]:
                best = (h_alpha, alpha, cand, gsq)

        if mode == "half":
            alpha_tilde = 0.5 * alpha
        elif not finite:
            alpha_tilde = config.tau1 * alpha
        else:
            hp0 = -gsq
            if prev_alpha is None:
                alpha_tilde = quadratic_interp_step(h0, hp0, alpha, h_alpha)
            else:
                alpha_tilde = cubic_interp_step(h0, hp0, alpha, h_alpha, prev_alpha, prev_h)
            if not math.isfinite(alpha_tilde):
                alpha_tilde = config.tau1 * alpha

        alpha_next = min(max(alpha_tilde, config.tau1 * alpha), config.tau2 * alpha)
        proposals.append((alpha, alpha_tilde, alpha_next))
        if finite:
            prev_alpha, prev_h = alpha, h_alpha
        alpha = alpha_next

    if best is None:
        # Nothing finite was ever seen; return the last (smallest-step) trial.
        cand = counted.problem.prox(anchor - alpha * grad_anchor, alpha)
        gmap = (anchor - cand) / alpha
        h_alpha = counted.F(cand)
        f_evals += 1
        best = (h_alpha, alpha, cand, float(gmap @ gmap))
    h_best, a_best, pt_best, gsq_best = best
    return SearchOutcome(
        a_best, pt_best, h_best, gsq_best, f_evals, None, math.nan,
        tuple(proposals), True, stored_anchor,
    )


def poly_linesearch(
    anchor: RulePoint,
    direction_scale: float,
    accept_test,
    ctx: ObjectiveContext,
    hyper: HyperParams,
    config: SolverConfig,
) -> tuple[float, RulePoint, int]:
    """Rule-point front end of the polynomial line search.

    ``accept_test(point, alpha, h_alpha)`` returns None to reject or a
    (kind, rhs) pair to accept. Returns (alpha_star, point, f_evals).
    """
    counted = _Counted(make_youden_problem(ctx, hyper))
    vec = anchor.as_vector()
    grad = counted.grad(vec)
    h0 = counted.F(vec)

    def vec_accept(cand, alpha, h_alpha):
        return accept_test(RulePoint.from_vector(cand), alpha, h_alpha)

    out = _line_search(counted, vec, grad, h0, direction_scale, vec_accept, config, "poly")
    return out.alpha, RulePoint.from_vector(out.point), out.f_evals


def _napg_minimize(
    problem: CompositeProblem, x0: np.ndarray, config: SolverConfig, ls_mode: str
) -> SolverResult:
    counted = _Counted(problem)
    trace = SolverTrace()

    v_prev = v_curr = u_curr = w_prev = np.asarray(x0, dtype=np.float64).copy()
    t_prev, t_curr = 0.0, 1.0
    F_v = counted.F(v_curr)
    if not math.isfinite(F_v):
        raise ValidationError("initial point has non-finite objective")
    c_avg = F_v
    q = 1.0
    grad_w_prev = counted.grad(w_prev)

    res0 = counted.residual(v_curr)
    trace.append(IterationRecord(
        0, F_v, res0, counted.f_evals, counted.grad_evals, math.nan, "init", c_avg,
    ))
    best_F, best_x = F_v, v_curr.copy()
    if res0 <= config.tol_residual:
        return SolverResult(best_x, best_F, trace, "stationary")

    flat_streak = 0
    delta = config.delta
    keep = config.record_points

    for k in range(1, config.max_iter + 1):
        w = v_curr + (t_prev / t_curr) * (u_curr - v_curr) \
            + ((t_prev - 1.0) / t_curr) * (v_curr - v_prev)
        grad_w = counted.grad(w)
        F_w = counted.F(w)
        alpha_y = bb_step(w - w_prev, grad_w - grad_w_prev, k, config)

        def accept_u(cand, alpha, h_alpha, _w=w, _Fw=F_w, _c=c_avg):
            d = float(np.sum((cand - _w) ** 2))
            if h_alpha <= _c - delta * d:
                return ("avg-descent", _c - delta * d)
            if h_alpha <= _Fw - delta * d:
                return ("w-descent", _Fw - delta * d)
            return None

        ls_u = _line_search(counted, w, grad_w, F_w, alpha_y, accept_u, config,
                            ls_mode, keep_anchor=keep)
        u_next, F_u = ls_u.point, ls_u.h_alpha
        searches = [ls_u]

        if F_u <= c_avg - delta * float(np.sum((u_next - w) ** 2)):
            v_next, F_next, branch, step = u_next, F_u, "u-branch", ls_u.alpha
            flagged = ls_u.flagged
        else:
            grad_v = counted.grad(v_curr)
            alpha_x = bb_step(v_curr - w_prev, grad_v - grad_w_prev, k, config)

            def accept_z(cand, alpha, h_alpha, _v=v_curr, _c=c_avg):
                d = float(np.sum((cand - _v) ** 2))
                if h_alpha <= _c - delta * d:
                    return ("avg-descent", _c - delta * d)
                return None

            ls_z = _line_search(counted, v_curr, grad_v, F_v, alpha_x, accept_z,
                                config, ls_mode, keep_anchor=keep)
            searches.append(ls_z)
            z_next, F_z = ls_z.point, ls_z.h_alpha
            if F_u <= F_z:
                v_next, F_next, branch, step = u_next, F_u, "z-branch-u", ls_u.alpha
            else:
                v_next, F_next, branch, step = z_next, F_z, "z-branch-z", ls_z.alpha
            flagged = ls_u.flagged or ls_z.flagged

        t_next = momentum_update(t_curr)
        c_avg, q = average_update(c_avg, q, F_next, config.eta)

        w_prev, grad_w_prev = w, grad_w
        v_prev, v_curr = v_curr, v_next
        u_curr = u_next
        t_prev, t_curr = t_curr, t_next

        res = counted.residual(v_curr)
        trace.append(IterationRecord(
            k, F_next, res, counted.f_evals, counted.grad_evals, step, branch,
            c_avg, flagged, tuple(searches) if keep else (),
        ))
        if F_next < best_F:
            best_F, best_x = F_next, v_curr.copy()

        if res <= config.tol_residual:
            return SolverResult(best_x, best_F, trace, "stationary")
        if abs(F_next - F_v) <= config.tol_f_rel * max(1.0, abs(F_v)):
            flat_streak += 1
            if flat_streak >= 5:
                return SolverResult(best_x, best_F, trace, "f_converged")
        else:
            flat_streak = 0
        F_v = F_next

    return SolverResult(best_x, best_F, trace, "max_iter")


def _papg_minimize(
    problem: CompositeProblem, x0: np.ndarray, config: SolverConfig
) -> SolverResult:
    counted = _Counted(problem)
    trace = SolverTrace()
    step = config.fixed_step

    v_prev = v_curr = np.asarray(x0, dtype=np.float64).copy()
    t_prev, t_curr = 0.0, 1.0
    F_v = counted.F(v_curr)
    if not math.isfinite(F_v):
        raise ValidationError("initial point has non-finite objective")

    res0 = counted.residual(v_curr)
    trace.append(IterationRecord(
        0, F_v, res0, counted.f_evals, counted.grad_evals, math.nan, "init", F_v,
    ))
    best_F, best_x = F_v, v_curr.copy()
    if res0 <= config.tol_residual:
        return SolverResult(best_x, best_F, trace, "stationary")

    flat_streak = 0
    for k in range(1, config.max_iter + 1):
        y = v_curr + ((t_prev - 1.0) / t_curr) * (v_curr - v_prev)
        cand = problem.prox(y - step * counted.grad(y), step)
        F_c = counted.F(cand)

        if not math.isfinite(F_c) or F_c > F_v:
            # Monotone restart: drop momentum and keep the current iterate.
            v_prev = v_curr
            t_prev, t_curr = 0.0, 1.0
            F_next, branch = F_v, "restart"
        else:
            v_prev, v_curr = v_curr, cand
            t_prev, t_curr = t_curr, momentum_update(t_curr)
            F_next, branch = F_c, "step"

        res = counted.residual(v_curr)
        trace.append(IterationRecord(
            k, F_next, res, counted.f_evals, counted.grad_evals, step, branch, F_next,
        ))
        if F_next < best_F:
            best_F, best_x = F_next, v_curr.copy()

        if res <= config.tol_residual:
            return SolverResult(best_x, best_F, trace, "stationary")
        if abs(F_next - F_v) <= config.tol_f_rel * max(1.0, abs(F_v)):
            flat_streak += 1
            if flat_streak >= 5:
                return SolverResult(best_x, best_F, trace, "f_converged")
        else:
            flat_streak = 0
        F_v = F_next

    return SolverResult(best_x, best_F, trace, "max_iter")


def minimize(problem: CompositeProblem, x0, config: SolverConfig) -> SolverResult:
    """Run the variant named by ``config.variant`` on a composite problem."""
    x0 = np.asarray(x0, dtype=np.float64)
    if config.variant == "papg":
        return _papg_minimize(problem, x0, config)
    mode = "half" if config.variant == "napg_backtracking" else "poly"
    return _napg_minimize(problem, x0, config, mode)


def _solve_rule(init, ctx, hyper, config, problem, variant):
    problem = problem or make_youden_problem(ctx, hyper)
    result = minimize(problem, init.as_vector(), replace(config, variant=variant))
    return RulePoint.from_vector(result.point), result.trace, result.reason


def solve(init: RulePoint, ctx, hyper, config: SolverConfig = SolverConfig(),
          problem: CompositeProblem | None = None):
    """NAPG with polynomial-interpolation line search (the default method)."""
    return _solve_rule(init, ctx, hyper, config, problem, "napg_poly")


def solve_backtracking(init: RulePoint, ctx, hyper, config: SolverConfig = SolverConfig(),
                       problem: CompositeProblem | None = None):
    """NAPG with plain step-halving line search."""
    return _solve_rule(init, ctx, hyper, config, problem, "napg_backtracking")


def solve_papg(init: RulePoint, ctx, hyper, config: SolverConfig = SolverConfig(),
               problem: CompositeProblem | None = None):
    """Monotone fixed-step APG baseline with restarts."""
    return _solve_rule(init, ctx, hyper, config, problem, "papg")
