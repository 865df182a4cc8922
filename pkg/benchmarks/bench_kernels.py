"""Timing comparison of the compiled and numpy score-kernel backends.

Runs smooth_f_raw and smooth_grad_raw on a grid of problem shapes and prints
per-call wall times plus the compiled/numpy speedup. Usage:

    python benchmarks/bench_kernels.py [--repeats 50]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from youden_napg import _kernels_numpy

try:
    from youden_napg import _scorekernels
except ImportError:
    _scorekernels = None

SHAPES = [
    # (n1, n0, p) covering the suite's regimes: small dense, tall, wide.
    (20, 20, 5),
    (200, 200, 10),
    (1000, 1000, 10),
    (150, 150, 500),
    (500, 500, 500),
]


def _instance(n1, n0, p, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n1, p)) + 0.4
    Y = rng.standard_normal((n0, p))
    omega = rng.standard_normal(p)
    omega /= np.linalg.norm(omega)
    return X, Y, omega, 0.1, 0.5, (n1 * n0) ** -0.1


def _time(fn, args, repeats):
    fn(*args)  # warm-up
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    if _scorekernels is None:
        print("compiled extension not built; showing numpy backend only")

    header = f"{'shape (n1,n0,p)':>18} {'kernel':>6} {'numpy':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n1, n0, p in SHAPES:
        inst = _instance(n1, n0, p, seed=0)
        for name, np_fn, c_fn in (
            ("f", _kernels_numpy.smooth_f_raw,
             _scorekernels.smooth_f_raw if _scorekernels else None),
            ("grad", _kernels_numpy.smooth_grad_raw,
             _scorekernels.smooth_grad_raw if _scorekernels else None),
        ):
            t_np = _time(np_fn, inst, args.repeats)
            if c_fn is None:
                print(f"{str((n1, n0, p)):>18} {name:>6} {t_np * 1e6:>10.1f}us {'-':>12} {'-':>8}")
                continue
            t_c = _time(c_fn, inst, args.repeats)
            # sanity: the two backends must agree
            ref = np_fn(*inst)
            got = c_fn(*inst)
            assert np.allclose(ref, got, rtol=1e-10, atol=1e-13)
            print(f"{str((n1, n0, p)):>18} {name:>6} {t_np * 1e6:>10.1f}us "
                  f"{t_c * 1e6:>10.1f}us {t_np / t_c:>7.2f}x")


if __name__ == "__main__":
    main()
