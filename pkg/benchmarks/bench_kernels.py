#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Times the claim-coverage kernel and the per-patent aggregation kernel on a
synthetic workload sized like a real search run (tens of thousands of
claim/piece pairs), then checks that both flavors agree bit-for-bit.

Usage:
    python benchmarks/bench_kernels.py [--pairs N] [--iters I]

``NOVELTYSEARCH_NUMBA=0`` makes the package itself run on the numpy path;
this script always times both flavors directly.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from noveltysearch import _kernels


def make_coverage_case(rng, n_pairs, vocab_size=30000,
                       claim_words=80, piece_words=150):
    claims = []
    pieces = []
    # One claim reused across all pairs, like a search run.
    claim = np.sort(rng.choice(vocab_size, size=claim_words, replace=False))
    for _ in range(n_pairs):
        claims.append(claim)
        size = rng.integers(piece_words // 2, piece_words + 1)
        pieces.append(np.sort(rng.choice(vocab_size, size=size, replace=False)))

    def pack(rows):
        offsets = np.zeros(len(rows) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([r.size for r in rows])
        return np.concatenate(rows).astype(np.int64), offsets

    return pack(claims) + pack(pieces)


def make_aggregate_case(rng, n_pairs, n_patents=1000):
    idx = rng.integers(0, n_patents, size=n_pairs).astype(np.int64)
    probs = rng.random(n_pairs)
    labels = (probs >= 0.5).astype(np.int64)
    return idx, labels, probs, n_patents


def bench(fn, args, iters):
    times = []
    for _ in range(iters):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times), float(np.median(times))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=40000,
                        help="claim/piece pairs per run (default: 40000)")
    parser.add_argument("--iters", type=int, default=15,
                        help="timing iterations (default: 15)")
    args = parser.parse_args()

    rng = np.random.default_rng(42)
    cov_case = make_coverage_case(rng, args.pairs)
    agg_case = make_aggregate_case(rng, args.pairs)

    rows = []
    cov_np = _kernels.coverage_numpy(*cov_case)
    rows.append(("coverage", "numpy") + bench(_kernels.coverage_numpy,
                                              cov_case, args.iters))
    agg_np = _kernels.aggregate_numpy(*agg_case)
    rows.append(("aggregate", "numpy") + bench(_kernels.aggregate_numpy,
                                               agg_case, args.iters))

    if _kernels._HAVE_NUMBA:
        start = time.perf_counter()
        cov_nb = _kernels.coverage_numba(*cov_case)
        agg_nb = _kernels.aggregate_numba(*agg_case)
        print(f"numba warmup (JIT compile): {time.perf_counter() - start:.2f}s")
        rows.append(("coverage", "numba") + bench(_kernels.coverage_numba,
                                                  cov_case, args.iters))
        rows.append(("aggregate", "numba") + bench(_kernels.aggregate_numba,
                                                   agg_case, args.iters))
    else:
        print("numba not importable; timing numpy fallback only")

    print(f"\n{args.pairs} pairs, {args.iters} iterations")
    print(f"{'kernel':<12} {'flavor':<8} {'min (ms)':>10} {'median (ms)':>12} {'speedup':>8}")
    base = {}
    for kernel, flavor, best, median in rows:
        if flavor == "numpy":
            base[kernel] = median
        speedup = base[kernel] / median if median else float("inf")
        print(f"{kernel:<12} {flavor:<8} {best * 1e3:>10.3f} "
              f"{median * 1e3:>12.3f} {speedup:>7.2f}x")

    if _kernels._HAVE_NUMBA:
        cov_equal = np.array_equal(cov_np, cov_nb)
        agg_equal = all(np.array_equal(a, b) for a, b in zip(agg_np, agg_nb))
        print(f"\nbit-identical results: coverage={cov_equal} "
              f"aggregate={agg_equal}")
        if not (cov_equal and agg_equal):
            raise SystemExit("flavor disagreement")


if __name__ == "__main__":
    main()
