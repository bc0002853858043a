#!/usr/bin/env python3
"""Benchmark the numba-compiled hot kernels against the numpy fallback.

Times the kernel-table build, the space-time convolution, and a full Picard
solve under both execution paths and prints the speedups.  Run from the
repo root:

    python benchmarks/bench_kernels.py [--nx 201] [--nt 81]

The numpy path is always available; the compiled path needs numba (run
without PSGLAB_NO_NUMBA).
"""

import argparse
import time

import numpy as np

import psglab as pg
from psglab._accel import HAVE_NUMBA
from psglab.table import build_kernel_table
from psglab.volterra import convolve_kernel, picard_solve


def timed(fn, repeat=1):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return result, best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nx", type=int, default=201)
    ap.add_argument("--nt", type=int, default=81)
    ap.add_argument("--eps", type=float, default=1e-2)
    args = ap.parse_args()

    params = pg.MediumParams(args.eps, 1.0, 1.0)
    grid = pg.SpaceTimeGrid(-18.0, 18.0, args.nx, 1.0, args.nt)
    wave = pg.TravellingWave.create(0.0, 1.0, 0.0)
    print(f"grid {args.nx}x{args.nt} on [-18,18]x[0,1], eps={args.eps}, "
          f"numba available: {HAVE_NUMBA}")

    rows = []
    if HAVE_NUMBA:
        build_kernel_table(params, pg.SpaceTimeGrid(-2, 2, 9, 0.2, 5), use_numba=True)  # JIT warmup
        tab_nb, t_nb = timed(lambda: build_kernel_table(params, grid, use_numba=True))
    tab_np, t_np = timed(lambda: build_kernel_table(params, grid, use_numba=False))
    if HAVE_NUMBA:
        dev = float(np.max(np.abs(tab_nb.values - tab_np.values)))
        rows.append(("kernel table", t_nb, t_np, dev))
        tab = tab_nb
    else:
        rows.append(("kernel table", float("nan"), t_np, 0.0))
        tab = tab_np

    rng = np.random.default_rng(0)
    src = pg.GridFunction(grid=grid, values=rng.standard_normal((grid.nx, grid.nt)))
    if HAVE_NUMBA:
        conv_nb, tc_nb = timed(lambda: convolve_kernel(src, tab, use_numba=True), repeat=3)
    conv_np, tc_np = timed(lambda: convolve_kernel(src, tab, use_numba=False), repeat=3)
    if HAVE_NUMBA:
        dev = float(np.max(np.abs(conv_nb.values - conv_np.values)))
        rows.append(("convolution", tc_nb, tc_np, dev))
    else:
        rows.append(("convolution", float("nan"), tc_np, 0.0))

    if HAVE_NUMBA:
        _, ts_nb = timed(lambda: picard_solve(wave, params, grid, table=tab,
                                              use_numba=True))
    _, ts_np = timed(lambda: picard_solve(wave, params, grid, table=tab,
                                          use_numba=False))
    rows.append(("picard solve", ts_nb if HAVE_NUMBA else float("nan"), ts_np, 0.0))

    print(f"\n{'stage':<14} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8}  max|diff|")
    for name, a, b, dev in rows:
        speed = b / a if a == a and a > 0 else float("nan")
        print(f"{name:<14} {a:>10.3f} {b:>10.3f} {speed:>8.1f}  {dev:.2e}")


if __name__ == "__main__":
    main()
