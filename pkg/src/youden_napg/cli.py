"""Command-line interface: simulate, fit, cv, eval and bench workflows."""

from __future__ import annotations

import csv
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import baseline, pipeline, simgen
from .core import (
    BiomarkerDataset,
    IngestionError,
    RulePoint,
    ValidationError,
    load_dataset,
    save_dataset,
)
from .objective import ObjectiveContext
from .pipeline import DEFAULT_LAMBDA_GRID, FitOptions, evaluate, initialize
from .core import HyperParams
from .solver import SolverConfig, solve, solve_backtracking, solve_papg

_SOLVER_NAMES = {"napg-poly": "napg_poly",
                 "napg-backtracking": "napg_backtracking",
                 "papg": "papg"}


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _parse_grid(text):
    if text is None:
        return DEFAULT_LAMBDA_GRID
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise click.BadParameter(f"cannot parse lambda grid {text!r}")


def _solver_config(max_iter, tol, eta, delta, tau1, tau2) -> SolverConfig:
    kwargs = {}
    if max_iter is not None:
        kwargs["max_iter"] = max_iter
    if tol is not None:
        kwargs["tol_residual"] = tol
    if eta is not None:
        kwargs["eta"] = eta
    if delta is not None:
        kwargs["delta"] = delta
    if tau1 is not None:
        kwargs["tau1"] = tau1
    if tau2 is not None:
        kwargs["tau2"] = tau2
    try:
        return SolverConfig(**kwargs)
    except ValidationError as err:
        raise click.BadParameter(str(err))


def _load(path, label_column, positive_label) -> BiomarkerDataset:
    try:
        return load_dataset(path, label_column, positive_label)
    except (IngestionError, ValidationError) as err:
        _fail(str(err))


@click.group()
def main():
    """Biomarker selection by penalized weighted Youden index maximization."""


@main.command()
@click.option("--scenario", type=click.Choice(["s1", "s2", "s3"]), required=True)
@click.option("--n", type=int, required=True, help="Total sample size per replication.")
@click.option("--reps", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--pi", type=float, default=0.5, show_default=True)
@click.option("--method", type=click.Choice(["ours", "lasso-logistic"]), default="ours",
              show_default=True)
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--write-datasets", is_flag=True, help="Also write each replication's CSV.")
def simulate(scenario, n, reps, seed, pi, method, folds, out_dir, write_datasets):
    """Run Monte Carlo replications of a scenario and write the summary CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    method_key = "lasso_logistic" if method == "lasso-logistic" else "ours"
    options = FitOptions(folds=folds)
    try:
        if write_datasets:
            for r in range(reps):
                data, _spec = simgen.GENERATORS[scenario](n, simgen._rep_seed(seed, r))
                save_dataset(data, out / f"{scenario}_n{n}_rep{r}.csv")
        summary = simgen.run_replications(scenario, n, reps, pi, method_key,
                                          seed, options)
    except ValidationError as err:
        _fail(str(err))
    simgen.write_summary_csv(out / "summary.csv", [summary])
    click.echo(f"wrote {out / 'summary.csv'} "
               f"(mean test J = {summary.mean_test_j:.4f}, reps ok = {summary.reps_ok})")


@main.command("fit")
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--test", "test_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--label-column", default="label", show_default=True)
@click.option("--positive-label", default="1", show_default=True)
@click.option("--pi", type=float, default=0.5, show_default=True)
@click.option("--lambda", "lambda1", type=float, help="Fixed penalty weight (skips CV).")
@click.option("--lambda-grid", help="Comma-separated grid for CV.")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--bandwidth", type=float)
@click.option("--method", type=click.Choice(["ours", "lasso-logistic"]), default="ours",
              show_default=True)
@click.option("--solver", type=click.Choice(sorted(_SOLVER_NAMES)), default="napg-poly",
              show_default=True)
@click.option("--max-iter", type=int)
@click.option("--tol", type=float)
@click.option("--eta", type=float)
@click.option("--delta", type=float)
@click.option("--tau1", type=float)
@click.option("--tau2", type=float)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
def fit_cmd(data_path, test_path, label_column, positive_label, pi, lambda1,
            lambda_grid, folds, bandwidth, method, solver, max_iter, tol,
            eta, delta, tau1, tau2, seed, out_dir):
    """Fit a rule on a CSV dataset; write result JSON and trace CSV."""
    if not 0.0 < pi < 1.0:
        raise click.BadParameter("pi must be in (0,1)")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train = _load(data_path, label_column, positive_label)
    config = _solver_config(max_iter, tol, eta, delta, tau1, tau2)
    grid = _parse_grid(lambda_grid)
    try:
        if method == "lasso-logistic":
            result = baseline.lasso_logistic_fit(train, grid, pi, folds, seed, config)
        else:
            options = FitOptions(bandwidth=bandwidth, lambda1=lambda1,
                                 lambda_grid=grid, folds=folds, seed=seed,
                                 solver=_SOLVER_NAMES[solver], solver_config=config)
            result = pipeline.fit(train, pi, options)
    except ValidationError as err:
        _fail(str(err))
    result.to_json(out / "fit_result.json")
    result.trace.to_csv(out / "trace.csv")
    click.echo(f"rule: omega={np.array2string(result.rule.omega, precision=4)} "
               f"cutoff={result.rule.cutoff:.4f} lambda={result.lambda_selected}")
    if test_path:
        test = _load(test_path, label_column, positive_label)
        metrics = evaluate(result.rule, test, pi)
        click.echo(f"test metrics: {json.dumps(metrics.to_dict())}")


@main.command()
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--label-column", default="label", show_default=True)
@click.option("--positive-label", default="1", show_default=True)
@click.option("--pi", type=float, default=0.5, show_default=True)
@click.option("--lambda-grid", help="Comma-separated grid.")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
def cv(data_path, label_column, positive_label, pi, lambda_grid, folds, seed, out_dir):
    """Cross-validate the penalty weight; write the CV table CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train = _load(data_path, label_column, positive_label)
    try:
        lam, table = pipeline.cross_validate(train, pi, _parse_grid(lambda_grid),
                                             folds, seed)
    except ValidationError as err:
        _fail(str(err))
    with open(out / "cv_table.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "mean_validation_J"])
        for row in table:
            writer.writerow([repr(row[0]), repr(row[1])])
    click.echo(f"selected lambda = {lam}")


@main.command("eval")
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--rule", "rule_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="fit_result.json from the fit command.")
@click.option("--label-column", default="label", show_default=True)
@click.option("--positive-label", default="1", show_default=True)
@click.option("--pi", type=float, default=None,
              help="Defaults to the pi stored in the rule file.")
def eval_cmd(data_path, rule_path, label_column, positive_label, pi):
    """Evaluate a stored rule on a dataset; print metrics JSON."""
    with open(rule_path, encoding="utf-8") as fh:
        stored = json.load(fh)
    rule = RulePoint(np.asarray(stored["omega"]), stored["cutoff"])
    data = _load(data_path, label_column, positive_label)
    try:
        metrics = evaluate(rule, data, pi if pi is not None else stored["pi"])
    except ValidationError as err:
        _fail(str(err))
    click.echo(json.dumps(metrics.to_dict(), indent=2))


@main.command()
@click.option("--scenario", type=click.Choice(["s1", "s2", "s3"]))
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--label-column", default="label", show_default=True)
@click.option("--positive-label", default="1", show_default=True)
@click.option("--n", type=int, default=400, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--pi", type=float, default=0.5, show_default=True)
@click.option("--lambda", "lambda1", type=float, default=0.1, show_default=True)
@click.option("--max-iter", type=int)
@click.option("--tol", type=float)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
def bench(scenario, data_path, label_column, positive_label, n, seed, pi,
          lambda1, max_iter, tol, out_dir):
    """Run all three solvers from one initialization; write per-solver traces."""
    if (scenario is None) == (data_path is None):
        raise click.UsageError("specify exactly one of --scenario or --data")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if scenario:
        data, _spec = simgen.GENERATORS[scenario](n, seed)
    else:
        data = _load(data_path, label_column, positive_label)

    h = pipeline.default_bandwidth(data.n1, data.n0)
    hyper = HyperParams(pi=pi, bandwidth=h, lambda1=lambda1,
                        lambda2=pipeline.DEFAULT_LAMBDA2)
    ctx = ObjectiveContext(data=data, pi=pi, bandwidth=h)
    init = initialize(data, hyper)
    config = _solver_config(max_iter, tol, None, None, None, None)

    runs = [("napg_poly", solve), ("napg_backtracking", solve_backtracking),
            ("papg", solve_papg)]
    combined = []
    for name, fn in runs:
        _rule, trace, reason = fn(init, ctx, hyper, config)
        trace.to_csv(out / f"trace_{name}.csv")
        for rec in trace.records:
            combined.append([name, rec.k, rec.f_value, rec.residual,
                             rec.cum_grad_evals])
        click.echo(f"{name}: {len(trace.records) - 1} iterations, "
                   f"final F = {trace.records[-1].f_value:.6f} ({reason})")
    with open(out / "bench_combined.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["solver", "iter", "f_value", "residual", "cum_grad_evals"])
        for row in combined:
            writer.writerow([row[0], row[1], repr(row[2]), repr(row[3]), row[4]])
    click.echo(f"wrote {out / 'bench_combined.csv'}")


if __name__ == "__main__":
    main()
