#!/usr/bin/env python3
"""Throughput comparison of the numba and numpy kernel backends.

Times the three sweep stages (lattice generation, preference evaluation,
matching mask) on configurable extremal instances, plus an end-to-end
envy-free sweep. The numba path pays a one-off JIT cost, so each kernel is
warmed before timing.

Usage: python benchmarks/bench_backends.py [--repeat N] [--sizes r:q ...]
"""

import argparse
import time

import numpy as np

from efl import _kernels
from efl.preferences import ExtremalInstance, default_eps, extremal_preferences
from efl.solver import SearchParams, find_envy_free_divisions


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(r, q, repeat):
    eps = np.asarray(default_eps(r))
    oracle = extremal_preferences(ExtremalInstance(r, tuple(eps)))
    rows = {}
    for backend in ("numba", "numpy"):
        _kernels.use_backend(backend)
        lattice = _kernels.compositions(q, r)  # warm
        lengths = lattice / float(q)
        prefs = _kernels.extremal_prefs(lengths, eps)
        _kernels.square_matching_mask(prefs)
        find_envy_free_divisions(oracle, SearchParams(q))

        rows[backend] = {
            "compositions": time_call(lambda: _kernels.compositions(q, r), repeat),
            "extremal_prefs": time_call(lambda: _kernels.extremal_prefs(lengths, eps), repeat),
            "matching_mask": time_call(lambda: _kernels.square_matching_mask(prefs), repeat),
            "full_sweep": time_call(
                lambda: find_envy_free_divisions(oracle, SearchParams(q)), repeat
            ),
        }
    n_points = _kernels.compositions(q, r).shape[0]
    print(f"\nr={r} q={q} ({n_points} lattice points), best of {repeat}:")
    header = f"  {'stage':<16}{'numba':>12}{'numpy':>12}{'speedup':>10}"
    print(header)
    for stage in ("compositions", "extremal_prefs", "matching_mask", "full_sweep"):
        nb = rows["numba"][stage]
        npv = rows["numpy"][stage]
        print(f"  {stage:<16}{nb * 1e3:>10.2f}ms{npv * 1e3:>10.2f}ms{npv / nb:>9.2f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument(
        "--sizes",
        nargs="+",
        default=["3:300", "4:60", "5:24"],
        help="cases as r:q pairs",
    )
    args = parser.parse_args()
    prior = _kernels.active_backend()
    try:
        for case in args.sizes:
            r, q = (int(v) for v in case.split(":"))
            bench_case(r, q, args.repeat)
    finally:
        _kernels.use_backend(prior)


if __name__ == "__main__":
    main()
