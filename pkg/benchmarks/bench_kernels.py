#!/usr/bin/env python3
"""Time the hot kernels on both backends: numba-compiled vs plain Python.

The two paths run the same source and produce bit-identical results; this
script measures what the compilation buys.  Sizes are chosen so the plain
path finishes in seconds.

    python3 benchmarks/bench_kernels.py [--scale N]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from topiclabel import kernels  # noqa: E402


def training_workload(scale):
    rng = np.random.default_rng(0)
    vocab, dim = 200, 32
    n_docs, doc_len = 20 * scale, 120
    tokens = rng.integers(0, vocab, size=n_docs * doc_len).astype(np.int32)
    offsets = np.arange(0, n_docs * doc_len + 1, doc_len, dtype=np.int64)
    doc_rows = np.arange(n_docs, dtype=np.int32)
    counts = rng.integers(1, 100, size=vocab)
    cdf = np.cumsum(counts.astype(np.float64) ** 0.75)
    cdf = np.round(cdf / cdf[-1] * kernels.NOISE_DOMAIN).astype(np.int64)
    cdf[-1] = kernels.NOISE_DOMAIN

    def run(impl):
        word_vecs = (np.random.default_rng(1).random((vocab, dim)) - 0.5) / dim
        ctx_vecs = np.zeros((vocab, dim))
        doc_vecs = (np.random.default_rng(2).random((n_docs, dim)) - 0.5) / dim
        impl(
            tokens, offsets, doc_rows, word_vecs, ctx_vecs, doc_vecs,
            np.ones(vocab), cdf, 5, 5, True, True, True, 0.025, 1e-4,
            0, tokens.size, kernels.lcg_seed(3),
        )

    return run


def pagerank_workload(scale):
    rng = np.random.default_rng(4)
    n = 1500 * scale
    m = 10 * n
    src = rng.integers(0, n, size=m)
    dst = rng.integers(0, n, size=m)
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr[1:], src, 1)
    indptr = np.cumsum(indptr)
    targets = dst.astype(np.int32)

    def run(impl):
        impl(indptr, targets, 0.85, 1e-10, 100)

    return run


def svr_workload(scale):
    rng = np.random.default_rng(5)
    X = rng.normal(size=(400 * scale, 4))
    y = X @ np.array([0.5, -0.2, 0.9, 0.1]) + 1.5 + rng.normal(0, 0.05, X.shape[0])

    def run(impl):
        impl(X, y, 1.0, 0.1, 2000)

    return run


def measure(run, impl, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        run(impl)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=int, default=1, help="workload multiplier")
    args = parser.parse_args()

    workloads = {
        "train_epoch": training_workload(args.scale),
        "pagerank_power": pagerank_workload(args.scale),
        "svr_fit": svr_workload(args.scale),
    }
    if not kernels.COMPILED:
        print("numba unavailable: timing the plain path only")

    print(f"{'kernel':<16} {'plain (s)':>10} {'numba (s)':>10} {'speedup':>9}")
    for name, run in workloads.items():
        plain = measure(run, kernels.PLAIN[name])
        if kernels.COMPILED:
            run(kernels.COMPILED[name])  # warm the JIT before timing
            fast = measure(run, kernels.COMPILED[name])
            print(f"{name:<16} {plain:>10.3f} {fast:>10.3f} {plain / fast:>8.1f}x")
        else:
            print(f"{name:<16} {plain:>10.3f} {'-':>10} {'-':>9}")


if __name__ == "__main__":
    main()
