#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs identical seeded workloads through both implementations, checks
that they agree, and reports best-of-N wall-clock times:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --length 1200 --nodes 400
"""

from __future__ import annotations

import argparse
import random
import sys
import time

import numpy as np

from faithsum.kernels import _pure

try:
    from faithsum.kernels import _native
except ImportError:
    _native = None


def best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def make_sequences(rng: random.Random, length: int, vocab: int):
    a = [rng.randrange(vocab) for _ in range(length)]
    b = [rng.randrange(vocab) for _ in range(length)]
    return a, b


def make_graph(rng: random.Random, nodes: int) -> np.ndarray:
    weights = np.zeros((nodes, nodes))
    for i in range(nodes):
        for j in range(i + 1, nodes):
            if rng.random() < 0.2:
                weights[i, j] = weights[j, i] = rng.uniform(0.05, 2.0)
    return weights


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--length", type=int, default=600,
                        help="sequence length for LCS / edit distance")
    parser.add_argument("--vocab", type=int, default=40,
                        help="distinct token count in the sequences")
    parser.add_argument("--nodes", type=int, default=250,
                        help="vertex count for power iteration")
    parser.add_argument("--repeats", type=int, default=5,
                        help="repetitions per measurement (best is kept)")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    if _native is None:
        print("compiled extension is not built; nothing to compare against")
        return 1

    rng = random.Random(args.seed)
    seq_a, seq_b = make_sequences(rng, args.length, args.vocab)
    arr_a = np.asarray(seq_a, dtype=np.int64)
    arr_b = np.asarray(seq_b, dtype=np.int64)
    graph = make_graph(rng, args.nodes)

    cases = [
        (
            f"lcs_length (len {args.length})",
            lambda: _pure.lcs_length(seq_a, seq_b),
            lambda: _native.lcs_length(arr_a, arr_b),
            lambda pure, native: pure == native,
        ),
        (
            f"edit_distance (len {args.length})",
            lambda: _pure.edit_distance(seq_a, seq_b),
            lambda: _native.edit_distance(arr_a, arr_b),
            lambda pure, native: pure == native,
        ),
        (
            f"power_iteration (n {args.nodes})",
            lambda: _pure.power_iteration(graph.tolist(), 0.85, 1e-8, 200),
            lambda: _native.power_iteration(graph, 0.85, 1e-8, 200),
            # Both follow the same accumulation order, so the score
            # vectors must agree bit for bit, not just approximately.
            lambda pure, native: list(pure[0]) == list(native[0])
            and pure[1] == native[1],
        ),
    ]

    print(f"{'kernel':<28} {'pure':>12} {'native':>12} {'speedup':>9}")
    for name, run_pure, run_native, agree in cases:
        if not agree(run_pure(), run_native()):
            print(f"{name:<28} RESULTS DISAGREE", file=sys.stderr)
            return 1
        t_pure = best_time(run_pure, args.repeats)
        t_native = best_time(run_native, args.repeats)
        print(
            f"{name:<28} {t_pure * 1e3:>10.2f}ms {t_native * 1e3:>10.2f}ms"
            f" {t_pure / t_native:>8.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
