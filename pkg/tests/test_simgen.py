"""Scenario generators and the Monte Carlo harness."""

import numpy as np
import pytest
from scipy import stats

from youden_napg import simgen
from youden_napg.core import ValidationError
from youden_napg.simgen import (
    AR1_RHO,
    TRUE_OMEGA,
    asymmetric_link,
    generate_s1,
    generate_s2,
    generate_s3,
    run_one_replication,
    run_replications,
    write_summary_csv,
)


class TestTruthVectors:
    def test_s1(self):
        assert TRUE_OMEGA["s1"].tolist() == [4, 0, 6, 0, 0, 7, 0, 8, 0, 0]

    def test_s2(self):
        assert TRUE_OMEGA["s2"].tolist() == [-5, -4, -4.5, 3.5, 0, 0, 0, 0, 0, 0]

    def test_s3_support_is_first_ten_of_500(self):
        w = TRUE_OMEGA["s3"]
        assert w.shape == (500,)
        assert w[:10].tolist() == [-5, 4.5, -4.5, 3.5, -3, 2.5, -2, 1.5, -1, 0.5]
        assert not w[10:].any()


class TestLink:
    def test_monotone_on_grid(self):
        u = np.arange(-10.0, 10.0, 0.01)
        g = asymmetric_link(u)
        assert np.all(np.diff(g) > 0)
        assert np.all((g > 0) & (g < 1))

    def test_asymmetric_about_zero(self):
        # not a symmetric sigmoid: g(0) + g(-0) != 1 pattern around tails
        assert asymmetric_link(0.0) + asymmetric_link(-0.0) != pytest.approx(1.0)


class TestGenerators:
    @pytest.mark.parametrize("gen,p", [(generate_s1, 10), (generate_s2, 10),
                                       (generate_s3, 500)])
    def test_shapes_and_determinism(self, gen, p):
        data1, spec1 = gen(200, seed=42)
        data2, _ = gen(200, seed=42)
        assert data1.p == p
        assert data1.n1 + data1.n0 == 200
        assert np.array_equal(data1.diseased, data2.diseased)
        assert np.array_equal(data1.healthy, data2.healthy)
        data3, _ = gen(200, seed=43)
        assert not np.array_equal(data1.diseased, data3.diseased)
        assert spec1.true_omega.shape == (p,)

    def test_s1_class_balance(self):
        data, _ = generate_s1(100_000, seed=0)
        assert data.n1 / 100_000 == pytest.approx(0.5, abs=0.01)

    def test_s1_markers_are_standard_normal(self):
        data, _ = generate_s1(20_000, seed=1)
        pooled = np.vstack([data.diseased, data.healthy])
        # class-conditional shift cancels when pooling
        assert abs(pooled.mean()) < 0.02
        assert abs(pooled.std() - 1.0) < 0.02

    def test_s2_marginals_match_analytic_cdfs(self):
        # With zero copula correlation the four skewed marginals are exact
        data, _ = generate_s2(10_000, seed=3, copula_corr=0.0)
        pooled = np.vstack([data.diseased, data.healthy])
        dists = [stats.chi2(df=3), stats.gamma(a=2), stats.expon(),
                 stats.t(df=5)]
        for j, dist in enumerate(dists):
            ks = stats.kstest(pooled[:, j], dist.cdf).statistic
            assert ks <= 0.02, f"column {j}: KS distance {ks}"

    def test_s2_noise_columns_are_gaussian(self):
        data, _ = generate_s2(10_000, seed=4)
        pooled = np.vstack([data.diseased, data.healthy])
        ks = stats.kstest(pooled[:, 7], stats.norm().cdf).statistic
        assert ks <= 0.03

    def test_s3_lag1_correlation(self):
        data, _ = generate_s3(10_000, seed=5)
        pooled = np.vstack([data.diseased, data.healthy])
        # first 10 columns are unperturbed AR(1) draws
        cors = [np.corrcoef(pooled[:, j], pooled[:, j + 1])[0, 1] for j in range(9)]
        assert np.allclose(cors, AR1_RHO, atol=0.03)

    def test_s3_unit_marginal_variance_before_perturbation(self):
        data, _ = generate_s3(10_000, seed=6)
        pooled = np.vstack([data.diseased, data.healthy])
        assert pooled[:, :10].std(axis=0) == pytest.approx(np.ones(10), abs=0.05)

    def test_tiny_n_rejected(self):
        with pytest.raises(ValidationError):
            generate_s1(2, seed=0)


class TestReplicationHarness:
    def test_substreams_differ_across_reps(self):
        assert simgen._rep_seed(0, 0) != simgen._rep_seed(0, 1)
        assert simgen._rep_seed(0, 1) == simgen._rep_seed(0, 1)

    def test_single_rep_matches_direct_fit(self):
        from youden_napg.core import split_train_test
        from youden_napg.pipeline import FitOptions, evaluate, fit

        opts = FitOptions(lambda1=0.1)
        summary = run_replications("s1", 200, reps=1, pi=0.5, method="ours",
                                   seed=11, options=opts)
        rep_seed = simgen._rep_seed(11, 0)
        data, spec = generate_s1(200, rep_seed)
        train, test = split_train_test(data, 0.5, rep_seed)
        res = fit(train, 0.5, opts)
        m = evaluate(res.rule, test, 0.5, truth=spec.true_omega)
        assert summary.mean_test_j == m.weighted_youden
        assert summary.reps_ok == 1 and summary.reps_failed == 0

    def test_lasso_method_routed(self):
        tr, te = run_one_replication("s1", 200, 0.5, "lasso_logistic", seed=1, rep=0)
        assert -1.0 <= te.weighted_youden <= 1.0

    def test_unknown_scenario(self):
        with pytest.raises(ValidationError):
            run_replications("s9", 200, reps=1, pi=0.5)

    def test_summary_csv(self, tmp_path):
        from youden_napg.pipeline import FitOptions

        summary = run_replications("s1", 200, reps=2, pi=0.5, seed=0,
                                   options=FitOptions(lambda1=0.1))
        path = tmp_path / "summary.csv"
        write_summary_csv(path, [summary])
        lines = path.read_text().strip().splitlines()
        assert lines[0].split(",")[:4] == ["scenario", "sample_size", "pi", "method"]
        cells = lines[1].split(",")
        assert cells[0] == "s1"
        assert float(cells[5]) == summary.mean_test_j
