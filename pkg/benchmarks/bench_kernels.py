"""Time the separation-enumeration kernels on random graphs.

Run once normally and once with TMWQO_NO_NUMBA=1 to compare backends:

    python3 benchmarks/bench_kernels.py
    TMWQO_NO_NUMBA=1 python3 benchmarks/bench_kernels.py
"""
import argparse
import time

import numpy as np

from tmwqo import _kernels
from tmwqo.generators import random_multigraph, rng_for


def adjacency(g):
    adj = np.zeros(g.n, dtype=np.int64)
    mult = np.zeros((g.n, g.n), dtype=np.int64)
    idx = {v: i for i, v in enumerate(g.vertices)}
    for a, b in g.edges:
        if a != b:
            adj[idx[a]] |= 1 << idx[b]
            adj[idx[b]] |= 1 << idx[a]
            mult[idx[a], idx[b]] += 1
            mult[idx[b], idx[a]] += 1
    return adj, mult


def bench(n: int, reps: int, seed: int):
    rng = rng_for(seed, "bench")
    g = random_multigraph(rng, n, n)
    adj, mult = adjacency(g)
    _kernels.enumerate_separation_masks(adj, n)  # warm-up and JIT
    t0 = time.perf_counter()
    for _ in range(reps):
        A, B = _kernels.enumerate_separation_masks(adj, n)
    t1 = time.perf_counter()
    for _ in range(reps):
        _kernels.side_edge_counts(A, B, mult, n)
    t2 = time.perf_counter()
    return len(A), (t1 - t0) / reps * 1e3, (t2 - t1) / reps * 1e3


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--sizes", type=int, nargs="+", default=[6, 8, 10, 12])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    print(f"backend={_kernels.backend()}")
    print(f"{'n':>3} {'separations':>12} {'enumerate ms':>13} {'counts ms':>10}")
    for n in a.sizes:
        cnt, te, tc = bench(n, a.reps, a.seed)
        print(f"{n:>3} {cnt:>12} {te:>13.2f} {tc:>10.2f}")


if __name__ == "__main__":
    main()
