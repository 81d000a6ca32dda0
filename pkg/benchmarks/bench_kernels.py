"""Benchmark the numba kernels against the pure-numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--sizes 256,1024,4096] [--repeats 5]

Prints a table of best-of-N wall times and the speedup ratio per kernel.
The numba functions are compiled once outside the timed region.
"""

import argparse
import time

import numpy as np

from riesz_one import _kernels as K


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _toeplitz_coeffs(rng, n):
    samples = np.exp(rng.normal(size=max(4 * n, 1024)))
    return np.fft.ifft(samples)[: n + 1]


def bench_levinson(n, repeats, rng):
    c = _toeplitz_coeffs(rng, n)
    t_np = _best_of(lambda: K.levinson_errors_numpy(c), repeats)
    t_nb = _best_of(lambda: K.levinson_errors_numba(c), repeats)
    return t_np, t_nb


def bench_series_exp(n, repeats, rng):
    c = (rng.normal(size=n) + 1j * rng.normal(size=n)) / n
    t_np = _best_of(lambda: K.series_exp_numpy(-0.1, c), repeats)
    t_nb = _best_of(lambda: K.series_exp_numba(-0.1, c), repeats)
    return t_np, t_nb


def bench_intersect(n, repeats, rng):
    a = np.unique(rng.integers(0, 50 * n, size=n)).astype(np.int64)
    b = np.unique(rng.integers(0, 50 * n, size=n)).astype(np.int64)
    t_np = _best_of(lambda: K.intersect_count_numpy(a, b), repeats)
    t_nb = _best_of(lambda: K.intersect_count_numba(a, b), repeats)
    return t_np, t_nb


BENCHES = {
    "levinson_errors": bench_levinson,
    "series_exp": bench_series_exp,
    "intersect_count": bench_intersect,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="256,1024,4096")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not K.USING_NUMBA:
        raise SystemExit(
            "numba backend inactive (RIESZ_ONE_BACKEND=numpy?); nothing to compare"
        )

    rng = np.random.default_rng(args.seed)
    sizes = [int(s) for s in args.sizes.split(",")]

    # warm up compilation before timing
    for fn in BENCHES.values():
        fn(16, 1, rng)

    print(f"{'kernel':<18} {'n':>6} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>8}")
    for name, fn in BENCHES.items():
        for n in sizes:
            t_np, t_nb = fn(n, args.repeats, rng)
            ratio = t_np / t_nb if t_nb > 0 else float("inf")
            print(
                f"{name:<18} {n:>6} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f} {ratio:>7.1f}x"
            )


if __name__ == "__main__":
    main()
