"""CLI workflows: simulate, fit, cv, eval, bench; exit codes and artifacts."""

import csv
import json

import numpy as np
import pytest
from click.testing import CliRunner

from youden_napg import simgen
from youden_napg.cli import main
from youden_napg.core import save_dataset

from conftest import make_separated_dataset


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def train_csv(tmp_path):
    data, _ = simgen.generate_s1(200, seed=7)
    path = tmp_path / "train.csv"
    save_dataset(data, path)
    return path


class TestSimulate:
    def test_single_replication(self, runner, tmp_path):
        result = runner.invoke(main, [
            "simulate", "--scenario", "s1", "--n", "200", "--reps", "1",
            "--seed", "7", "--out-dir", str(tmp_path), "--write-datasets",
        ])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "summary.csv").exists()
        assert (tmp_path / "s1_n200_rep0.csv").exists()
        with open(tmp_path / "summary.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == simgen.SUMMARY_HEADER
        assert rows[1][0] == "s1"

    def test_deterministic_summary(self, runner, tmp_path):
        args = ["simulate", "--scenario", "s1", "--n", "200", "--reps", "2",
                "--seed", "3"]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert runner.invoke(main, args + ["--out-dir", str(out_a)]).exit_code == 0
        assert runner.invoke(main, args + ["--out-dir", str(out_b)]).exit_code == 0
        assert (out_a / "summary.csv").read_bytes() == (out_b / "summary.csv").read_bytes()

    def test_unknown_scenario_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, [
            "simulate", "--scenario", "s9", "--n", "200", "--out-dir", str(tmp_path),
        ])
        assert result.exit_code == 2

    def test_tiny_n_fails_cleanly(self, runner, tmp_path):
        result = runner.invoke(main, [
            "simulate", "--scenario", "s1", "--n", "2", "--out-dir", str(tmp_path),
        ])
        assert result.exit_code == 1
        assert "error:" in result.output


class TestFit:
    def test_fixed_lambda_writes_artifacts(self, runner, train_csv, tmp_path):
        out = tmp_path / "fit"
        result = runner.invoke(main, [
            "fit", "--data", str(train_csv), "--lambda", "0.1",
            "--out-dir", str(out),
        ])
        assert result.exit_code == 0, result.output
        doc = json.loads((out / "fit_result.json").read_text())
        assert doc["lambda"] == 0.1
        assert len(doc["omega"]) == 10
        with open(out / "trace.csv", newline="") as fh:
            header = next(csv.reader(fh))
        assert header[:3] == ["iter", "f_value", "residual"]

    def test_test_set_metrics_printed(self, runner, train_csv, tmp_path):
        data, _ = simgen.generate_s1(200, seed=8)
        test_path = tmp_path / "test.csv"
        save_dataset(data, test_path)
        result = runner.invoke(main, [
            "fit", "--data", str(train_csv), "--test", str(test_path),
            "--lambda", "0.1", "--out-dir", str(tmp_path / "out"),
        ])
        assert result.exit_code == 0, result.output
        assert "test metrics:" in result.output
        assert "weighted_youden" in result.output

    def test_lasso_method(self, runner, train_csv, tmp_path):
        out = tmp_path / "lasso"
        result = runner.invoke(main, [
            "fit", "--data", str(train_csv), "--method", "lasso-logistic",
            "--lambda-grid", "0.1,0.01", "--folds", "2", "--out-dir", str(out),
        ])
        assert result.exit_code == 0, result.output
        doc = json.loads((out / "fit_result.json").read_text())
        assert doc["method"] == "lasso_logistic"
        assert doc["h"] is None

    def test_missing_file_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, [
            "fit", "--data", str(tmp_path / "nope.csv"), "--lambda", "0.1",
        ])
        assert result.exit_code == 2

    def test_bad_label_column_exits_1(self, runner, train_csv, tmp_path):
        result = runner.invoke(main, [
            "fit", "--data", str(train_csv), "--label-column", "wrong",
            "--lambda", "0.1", "--out-dir", str(tmp_path),
        ])
        assert result.exit_code == 1
        assert "error:" in result.output

    def test_bad_pi_exits_2(self, runner, train_csv):
        result = runner.invoke(main, [
            "fit", "--data", str(train_csv), "--pi", "1.5", "--lambda", "0.1",
        ])
        assert result.exit_code == 2

    def test_bad_solver_option_exits_2(self, runner, train_csv):
        result = runner.invoke(main, [
            "fit", "--data", str(train_csv), "--lambda", "0.1", "--eta", "2.0",
        ])
        assert result.exit_code == 2


class TestCv:
    def test_writes_table(self, runner, train_csv, tmp_path):
        out = tmp_path / "cv"
        result = runner.invoke(main, [
            "cv", "--data", str(train_csv), "--lambda-grid", "1.0,0.1,0.01",
            "--folds", "2", "--out-dir", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert "selected lambda" in result.output
        with open(out / "cv_table.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["lambda", "mean_validation_J"]
        assert [float(r[0]) for r in rows[1:]] == [1.0, 0.1, 0.01]

    def test_unparsable_grid_exits_2(self, runner, train_csv):
        result = runner.invoke(main, [
            "cv", "--data", str(train_csv), "--lambda-grid", "a,b",
        ])
        assert result.exit_code == 2


class TestEval:
    def test_round_trip_through_stored_rule(self, runner, train_csv, tmp_path):
        out = tmp_path / "fit"
        assert runner.invoke(main, [
            "fit", "--data", str(train_csv), "--lambda", "0.1",
            "--out-dir", str(out),
        ]).exit_code == 0
        result = runner.invoke(main, [
            "eval", "--data", str(train_csv), "--rule", str(out / "fit_result.json"),
        ])
        assert result.exit_code == 0, result.output
        metrics = json.loads(result.output)
        stored = json.loads((out / "fit_result.json").read_text())
        assert metrics["weighted_youden"] == pytest.approx(
            stored["metrics"]["weighted_youden"]
        )

    def test_pi_override(self, runner, train_csv, tmp_path):
        out = tmp_path / "fit"
        runner.invoke(main, ["fit", "--data", str(train_csv), "--lambda", "0.1",
                             "--out-dir", str(out)])
        result = runner.invoke(main, [
            "eval", "--data", str(train_csv), "--rule", str(out / "fit_result.json"),
            "--pi", "0.6",
        ])
        assert result.exit_code == 0
        m = json.loads(result.output)
        j = 2 * (0.6 * m["sensitivity"] + 0.4 * m["specificity"]) - 1
        assert m["weighted_youden"] == pytest.approx(j)


class TestBench:
    def test_scenario_bench_writes_traces(self, runner, tmp_path):
        result = runner.invoke(main, [
            "bench", "--scenario", "s1", "--n", "200", "--seed", "7",
            "--tol", "1e-4", "--out-dir", str(tmp_path),
        ])
        assert result.exit_code == 0, result.output
        for name in ("napg_poly", "napg_backtracking", "papg"):
            assert (tmp_path / f"trace_{name}.csv").exists()
        with open(tmp_path / "bench_combined.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["solver", "iter", "f_value", "residual", "cum_grad_evals"]
        assert {r[0] for r in rows[1:]} == {"napg_poly", "napg_backtracking", "papg"}

    def test_requires_exactly_one_source(self, runner, tmp_path):
        assert runner.invoke(main, ["bench", "--out-dir", str(tmp_path)]).exit_code == 2
        data = make_separated_dataset()
        path = tmp_path / "d.csv"
        save_dataset(data, path)
        result = runner.invoke(main, [
            "bench", "--scenario", "s1", "--data", str(path),
        ])
        assert result.exit_code == 2
