"""Lasso-logistic comparator."""

import math

import numpy as np
import pytest

from youden_napg.baseline import (
    LogisticModel,
    lasso_logistic_fit,
    logistic_loss_grad,
    make_lasso_logistic_problem,
)
from youden_napg.core import BiomarkerDataset, ValidationError
from youden_napg.solver import SolverConfig, minimize

from conftest import make_separated_dataset


class TestLogisticLoss:
    def test_zero_model_on_balanced_data_is_log2(self):
        data = make_separated_dataset(n1=10, n0=10, p=3)
        model = LogisticModel(np.zeros(3), 0.0)
        loss, _ = logistic_loss_grad(model, data)
        assert loss == pytest.approx(math.log(2.0), abs=1e-15)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        data = make_separated_dataset(n1=15, n0=12, p=4, seed=5)
        x = rng.standard_normal(5)
        model = LogisticModel(x[:-1], float(x[-1]))
        loss, grad = logistic_loss_grad(model, data)
        eps = 1e-6
        for i in range(5):
            hi, lo = x.copy(), x.copy()
            hi[i] += eps
            lo[i] -= eps
            l_hi, _ = logistic_loss_grad(LogisticModel(hi[:-1], float(hi[-1])), data)
            l_lo, _ = logistic_loss_grad(LogisticModel(lo[:-1], float(lo[-1])), data)
            fd = (l_hi - l_lo) / (2 * eps)
            assert grad[i] == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_stable_for_extreme_scores(self):
        data = make_separated_dataset(n1=5, n0=5, p=2)
        loss, grad = logistic_loss_grad(LogisticModel(np.array([1e4, -1e4]), 0.0), data)
        assert np.isfinite(loss) and np.isfinite(grad).all()

    def test_non_finite_model_rejected(self):
        with pytest.raises(ValidationError):
            LogisticModel(np.array([np.inf]), 0.0)


class TestLassoProblem:
    def test_prox_soft_thresholds_coefficients_only(self):
        data = make_separated_dataset(p=2)
        problem = make_lasso_logistic_problem(data, lam=1.0)
        x = np.array([2.0, -0.3, 5.0])  # last entry is the intercept
        out = problem.prox(x, 0.5)
        assert out[0] == pytest.approx(1.5)
        assert out[1] == 0.0
        assert out[2] == 5.0  # intercept unpenalized

    def test_solver_reaches_small_gradient_mapping(self):
        data = make_separated_dataset(n1=40, n0=40, p=3, gap=1.5, seed=8)
        problem = make_lasso_logistic_problem(data, lam=0.01)
        res = minimize(problem, np.zeros(4), SolverConfig(tol_residual=1e-8))
        gm = res.point - problem.prox(res.point - problem.grad_f(res.point), 1.0)
        assert np.linalg.norm(gm) <= 1e-5


class TestLassoFit:
    def test_separable_data_reaches_perfect_training_j(self):
        rng = np.random.default_rng(2)
        diseased = rng.standard_normal((30, 2)) + 6.0
        healthy = rng.standard_normal((30, 2))
        data = BiomarkerDataset(diseased, healthy)
        res = lasso_logistic_fit(data, lambda_grid=[0.001], pi=0.5, folds=2)
        assert res.train_metrics.weighted_youden == 1.0

    def test_result_shape_and_flags(self, small_data):
        res = lasso_logistic_fit(small_data, lambda_grid=[0.1, 0.01], folds=2)
        assert res.method == "lasso_logistic"
        assert math.isnan(res.bandwidth)
        assert res.to_dict()["h"] is None
        assert len(res.cv_table) == 2
        assert res.lambda_selected in (0.1, 0.01)

    def test_huge_lambda_degenerate(self, small_data):
        res = lasso_logistic_fit(small_data, lambda_grid=[100.0], folds=2)
        assert res.degenerate

    def test_too_few_rows(self):
        data = make_separated_dataset(n1=3, n0=3)
        with pytest.raises(ValidationError):
            lasso_logistic_fit(data, folds=5)
