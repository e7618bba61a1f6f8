"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

JIT compilation is triggered once before timing.
"""

import argparse
import timeit

import numpy as np

from treetop import kernels

SSE_A = np.array([[1, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=np.uint8)


def cases(rng):
    adj = (rng.random((12, 12)) < 0.4).astype(np.uint8)
    np.fill_diagonal(adj, 1)
    v = rng.random(16)
    v /= v.sum()
    return {
        "log_recursion k=12 n=2000": (
            kernels.log_recursion_numba, kernels.log_recursion_numpy, (adj, 2, 2000)),
        "left_perron_iteration k=12": (
            kernels.left_perron_iteration_numba, kernels.left_perron_iteration_numpy,
            (adj.astype(np.float64), 1e-12, 100000)),
        "tree_block_search k=3 |Delta|=15": (
            kernels.tree_block_search_numba, kernels.tree_block_search_numpy, (SSE_A, 2, 15, 0)),
        "min_partial_sum_ratio k=16": (
            kernels.min_partial_sum_ratio_numba, kernels.min_partial_sum_ratio_numpy, (v, 2, 1.1)),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<36}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, (fast, slow, call_args) in cases(rng).items():
        fast(*call_args)  # compile
        t_fast = min(timeit.repeat(lambda: fast(*call_args), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: slow(*call_args), number=1, repeat=args.repeat))
        print(f"{name:<36}{t_fast * 1e3:>12.3f}{t_slow * 1e3:>12.3f}{t_slow / t_fast:>10.1f}")


if __name__ == "__main__":
    main()
