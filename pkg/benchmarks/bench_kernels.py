"""Timing comparison of the compiled kernels against the numpy fallback.

Run with:  python benchmarks/bench_kernels.py [--sizes 2000,5000,10000]
"""

import argparse
import time

import numpy as np

from sensakit._kernels import BACKEND, _numpy_impl
from sensakit._kernels import pair_sums as selected_pair_sums
from sensakit._kernels import prim_mst as selected_prim_mst


def timed(fn, *args, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="2000,5000,10000")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if BACKEND != "ext":
        print("note: compiled extension not available; comparing fallback to itself")
    rng = np.random.default_rng(0)
    print(f"active backend: {BACKEND}")
    print(f"{'kernel':<10} {'n':>7} {'selected':>10} {'numpy':>10} {'speedup':>8}")
    for n in sizes:
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        h = n ** (-1.0 / 6.0)
        t_sel = timed(selected_pair_sums, x, y, h)
        t_np = timed(_numpy_impl.pair_sums, x, y, h)
        print(f"{'pair_sums':<10} {n:>7} {t_sel:>9.3f}s {t_np:>9.3f}s {t_np / t_sel:>7.1f}x")
    for n in sizes:
        pts = rng.random((n, 2))
        px, py = pts[:, 0].copy(), pts[:, 1].copy()
        t_sel = timed(selected_prim_mst, px, py)
        t_np = timed(_numpy_impl.prim_mst, px, py)
        print(f"{'prim_mst':<10} {n:>7} {t_sel:>9.3f}s {t_np:>9.3f}s {t_np / t_sel:>7.1f}x")


if __name__ == "__main__":
    main()
