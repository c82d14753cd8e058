"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from commsig._backend import available_backends
from commsig.detect import louvain
from commsig.synth import generate, preset


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    graph, groups = generate(preset("syn3", 0.05, seed=1))
    rng = np.random.default_rng(0)
    tails = [(int(d), int(k), float(p)) for d, k, p in
             zip(rng.integers(50, 5000, 500), rng.integers(0, 50, 500), rng.uniform(0.01, 0.5, 500))]
    tails = [(d, min(d, int(d * p) + k), p) for d, k, p in tails]

    def run_louvain(k):
        louvain(graph, seed=0, kernels=k)

    def run_counts(k):
        mask = graph.scratch_mask()
        for g in groups * 20:
            k.group_counts(graph.indptr, graph.indices, graph.weights, g.array, mask)

    def run_triangles(k):
        mask = graph.scratch_mask()
        for g in groups:
            k.triangle_members(graph.indptr, graph.indices, g.array, mask)

    def run_tails(k):
        for d, s, p in tails:
            k.log_binomial_tail(d, s, p)

    return {"louvain (syn3, 490 nodes)": run_louvain, "group_counts (200 groups)": run_counts,
            "triangle_members (10 groups)": run_triangles, "log_binomial_tail (500 tails)": run_tails}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    print(f"{'kernel':32s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in cases().items():
        t = {b: best_of(lambda: fn(k), args.repeat) for b, k in backends.items()}
        row = f"{name:32s}" + "".join(f"{t[b] * 1e3:10.2f}ms" for b in backends)
        if "cython" in t:
            row += f"  {t['python'] / t['cython']:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
