#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot paths on a karate-club-sized influence instance:
the sampling-estimator inner loop, the surrogate gradient, and
standard-basis polynomial evaluation.  Run after building the extension:

    python benchmarks/bench_kernels.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from submax._kernels import backends
from submax.dataio import gen_ic_cascades, zkc_graph
from submax.objectives import InfluenceObjective


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best * 1e6  # microseconds


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--samples", type=int, default=100,
                        help="Bernoulli draws per sampling-estimator call")
    args = parser.parse_args()

    graph = zkc_graph()
    obj = InfluenceObjective(34, gen_ic_cascades(graph, 0.5, 20, seed=3))
    comps = obj.components(0)
    surrogate = obj.surrogate_complement(0, 2)
    s_coeffs, s_flat, s_offsets = surrogate._flat_arrays()

    rng = np.random.default_rng(0)
    y = rng.random(34)
    X = (rng.random((args.samples, 34)) < y).astype(np.uint8)

    cases = {
        f"samp_mean_diffs (N={args.samples}, n=34)": lambda impl: impl.samp_mean_diffs(
            comps.coeffs, comps.flat, comps.offsets, comps.term_comp,
            comps.comp_const, comps.comp_of_var, comps.link_code, X,
        ),
        f"surrogate gradient ({surrogate.num_terms} terms)": lambda impl: impl.poly_grad(
            s_coeffs, s_flat, s_offsets, y, 34, True
        ),
        f"surrogate value ({surrogate.num_terms} terms)": lambda impl: impl.poly_value(
            s_coeffs, s_flat, s_offsets, y, True
        ),
    }

    impls = backends()
    print(f"backends available: {', '.join(impls)}")
    header = f"{'kernel':<42}" + "".join(f"{name:>12}" for name in impls)
    if len(impls) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, call in cases.items():
        times = {
            name: timeit(lambda impl=impl: call(impl), args.repeats)
            for name, impl in impls.items()
        }
        row = f"{label:<42}" + "".join(
            f"{times[name]:>10.1f}us" for name in impls
        )
        if "python" in times and "cython" in times:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
