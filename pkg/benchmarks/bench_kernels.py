#!/usr/bin/env python3
"""Benchmark the mixing-matrix sketch kernel: numba vs pure numpy.

The sketch product B @ D (B a seed-defined k-by-n Rademacher matrix that
is never materialised) dominates the runtime of compressed releases at
large n.  This script times both backends on a grid of (n, k, columns)
shapes and prints a comparison table.

Usage:
    python benchmarks/bench_kernels.py [--repeats 3] [--large]

The numba path is imported first so its JIT compilation cost is paid
outside the timed region (and cached on disk for later runs).
"""

import argparse
import time

import numpy as np

from mpdp import kernels

SHAPES = [
    # (n, k, cols)  ~ desk-scale sweep points
    (10_000, 21, 11),
    (100_000, 65, 11),
    (300_000, 113, 11),
    (10_000, 4_000, 12),
]
LARGE_SHAPES = [
    (1_000_000, 206, 11),
    (3_000_000, 358, 11),
    (330_000, 10_000, 91),
]


def time_call(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--large", action="store_true",
                        help="include full-scale shapes (minutes of runtime)")
    args = parser.parse_args()

    if not kernels.NUMBA_ENABLED:
        print("numba backend unavailable (MPDP_DISABLE_NUMBA set or numba missing);")
        print("timing the numpy fallback only.\n")

    shapes = SHAPES + (LARGE_SHAPES if args.large else [])
    rng = np.random.default_rng(0)
    print(f"{'n':>10} {'k':>7} {'cols':>5} {'numba (s)':>11} {'numpy (s)':>11} {'speedup':>8}")
    for n, k, cols in shapes:
        data = rng.uniform(-1.0, 1.0, size=(n, cols))
        numpy_time = time_call(lambda: kernels._sketch_product_numpy(7, data, k), args.repeats)
        if kernels.NUMBA_ENABLED:
            kernels.sketch_product(7, data, k)  # compile outside the timer
            numba_time = time_call(lambda: kernels.sketch_product(7, data, k), args.repeats)
            ratio = numpy_time / numba_time
            print(f"{n:>10} {k:>7} {cols:>5} {numba_time:>11.4f} {numpy_time:>11.4f} {ratio:>7.1f}x")
        else:
            print(f"{n:>10} {k:>7} {cols:>5} {'-':>11} {numpy_time:>11.4f} {'-':>8}")


if __name__ == "__main__":
    main()
