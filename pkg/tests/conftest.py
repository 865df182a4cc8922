"""Shared fixtures and invariant checkers for the test suite."""

import numpy as np
import pytest

from youden_napg.core import BiomarkerDataset


def make_separated_dataset(n1=20, n0=20, p=5, gap=1.0, seed=0):
    """Two Gaussian clouds with the diseased mean shifted along (1,...,1)."""
    rng = np.random.default_rng(seed)
    diseased = rng.standard_normal((n1, p)) + gap
    healthy = rng.standard_normal((n0, p))
    return BiomarkerDataset(diseased=diseased, healthy=healthy)


@pytest.fixture
def small_data():
    return make_separated_dataset()


def assert_average_bound(trace, slack=1e-9):
    """Nonmonotone-average invariant: F(v_k) <= c_k <= running mean of F.

    Record k stores F(v_{k+1}) together with the matching average c_{k+1},
    so the running mean over records 0..k is the arithmetic mean A_{k+1}.
    """
    running = 0.0
    for i, rec in enumerate(trace.records):
        running += rec.f_value
        a_k = running / (i + 1)
        assert rec.f_value <= rec.c_avg + slack, (
            f"record {rec.k}: F={rec.f_value!r} > c={rec.c_avg!r}"
        )
        assert rec.c_avg <= a_k + slack, (
            f"record {rec.k}: c={rec.c_avg!r} > A={a_k!r}"
        )


def assert_counters_nondecreasing(trace):
    f_prev = g_prev = -1
    for rec in trace.records:
        assert rec.cum_f_evals >= f_prev
        assert rec.cum_grad_evals >= g_prev
        f_prev, g_prev = rec.cum_f_evals, rec.cum_grad_evals
