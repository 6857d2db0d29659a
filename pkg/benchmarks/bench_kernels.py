#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the round kernel and the trial-loop statistics kernel on a mid-size
regular cover under both implementations and prints a timing table.  The two
paths compute bit-identical results (asserted here as well), so the only
difference is speed.

Usage: python3 benchmarks/bench_kernels.py [--trials 2000] [--n 400] [--d 16]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dpnibble import _kernels as K
from dpnibble.generators import random_dp_cover, random_regular


def time_call(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--d", type=int, default=16)
    ap.add_argument("--ell", type=int, default=12)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not available; nothing to compare")

    g = random_regular(args.n, args.d, args.seed)
    cov = random_dp_cover(g, args.ell, 1.0, args.seed + 1)
    csr = (cov.lptr, cov.lcolors, cov.owner, cov.cover.indptr, cov.cover.indices)

    # warm the JIT before timing
    K.round_numba(0, 0.1, *csr)
    K.round_stats_numba(0, 2, 0.1, *csr, 10.0, 5.0, 20.0, -1)

    rows = []
    t_nb, out_nb = time_call(K.round_numba, 7, 0.1, *csr)
    t_np, out_np = time_call(K.round_numpy, 7, 0.1, *csr)
    for a, b in zip(out_nb, out_np):
        assert np.array_equal(a, b), "kernel outputs diverged"
    rows.append(("round (single)", t_nb, t_np))

    stats_args = (3, args.trials, 0.1, *csr, 10.0, 5.0, 20.0, -1)
    t_nb, out_nb = time_call(K.round_stats_numba, *stats_args, repeats=1)
    t_np, out_np = time_call(K.round_stats_numpy, *stats_args, repeats=1)
    for a, b in zip(out_nb, out_np):
        assert np.array_equal(a, b), "stats outputs diverged"
    rows.append((f"stats ({args.trials} trials)", t_nb, t_np))

    print(f"instance: n={args.n} d={args.d} ell={args.ell} "
          f"(colors={cov.num_colors}, cover edges={cov.cover.num_edges})")
    print(f"{'kernel':<24}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, tn, tp in rows:
        print(f"{name:<24}{tn:>11.4f}s{tp:>11.4f}s{tp / tn:>9.1f}x")


if __name__ == "__main__":
    main()
