"""Timing comparison between the compiled kernels and their numpy twins.

Run as a script:

    python3 benchmarks/bench_kernels.py [--reps 5] [--scale 1.0]

Each kernel is timed on the same synthetic inputs under both builds;
the compiled build is called once first so JIT compilation stays out of
the measurement.  Set ``FGF_NO_NUMBA=1`` to confirm the dispatchers fall
back (the table then reports the numpy build twice).
"""

import argparse
import time

import numpy as np

from fgfusion import _accel
from fgfusion._accel import (
    HAS_NUMBA,
    assign_labels_numpy,
    backend,
    cluster_dist_sums_numpy,
    pairwise_sq_dists_numpy,
    sgns_epoch_numpy,
)


def _time(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_sgns(rng, scale, reps):
    n_vocab, dim = 400, 64
    n_pairs = int(20_000 * scale)
    w_in = rng.normal(scale=0.1, size=(n_vocab, dim))
    w_out = rng.normal(scale=0.1, size=(n_vocab, dim))
    centers = rng.integers(0, n_vocab, size=n_pairs)
    contexts = rng.integers(0, n_vocab, size=n_pairs)
    negatives = rng.integers(0, n_vocab, size=(n_pairs, 5))
    lrs = np.full(n_pairs, 0.01)

    def numpy_run():
        sgns_epoch_numpy(w_in.copy(), w_out.copy(), centers, contexts, negatives, lrs)

    rows = [("sgns_epoch", f"{n_pairs} pairs, dim {dim}", _time(numpy_run, reps), None)]
    if HAS_NUMBA:
        def numba_run():
            _accel._sgns_epoch_numba(
                w_in.copy(), w_out.copy(), centers, contexts, negatives, lrs
            )

        numba_run()  # compile
        rows[0] = rows[0][:3] + (_time(numba_run, reps),)
    return rows


def bench_pairwise(rng, scale, reps):
    n = int(1200 * scale)
    x = np.ascontiguousarray(rng.normal(size=(n, 32)))
    rows = [("pairwise_sq_dists", f"{n}x32", _time(lambda: pairwise_sq_dists_numpy(x), reps), None)]
    if HAS_NUMBA:
        _accel._pairwise_sq_dists_numba(x)
        rows[0] = rows[0][:3] + (_time(lambda: _accel._pairwise_sq_dists_numba(x), reps),)
    return rows


def bench_assign(rng, scale, reps):
    n, k = int(20_000 * scale), 12
    x = np.ascontiguousarray(rng.normal(size=(n, 16)))
    centers = np.ascontiguousarray(rng.normal(size=(k, 16)))
    rows = [("assign_labels", f"{n} pts, k={k}", _time(lambda: assign_labels_numpy(x, centers), reps), None)]
    if HAS_NUMBA:
        _accel._assign_labels_numba(x, centers)
        rows[0] = rows[0][:3] + (_time(lambda: _accel._assign_labels_numba(x, centers), reps),)
    return rows


def bench_sums(rng, scale, reps):
    n, k = int(1500 * scale), 12
    x = np.ascontiguousarray(rng.normal(size=(n, 8)))
    dists = np.sqrt(pairwise_sq_dists_numpy(x))
    labels = rng.integers(0, k, size=n).astype(np.int64)
    rows = [("cluster_dist_sums", f"{n}x{n} dists", _time(lambda: cluster_dist_sums_numpy(dists, labels, k), reps), None)]
    if HAS_NUMBA:
        cd = np.ascontiguousarray(dists)
        _accel._cluster_dist_sums_numba(cd, labels, k)
        rows[0] = rows[0][:3] + (_time(lambda: _accel._cluster_dist_sums_numba(cd, labels, k), reps),)
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=5, help="timing repetitions, best-of")
    parser.add_argument("--scale", type=float, default=1.0, help="problem-size multiplier")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"active backend: {backend()}  (numba importable: {HAS_NUMBA})")
    print(f"{'kernel':<20} {'size':<18} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    rows = []
    rows += bench_sgns(rng, args.scale, args.reps)
    rows += bench_pairwise(rng, args.scale, args.reps)
    rows += bench_assign(rng, args.scale, args.reps)
    rows += bench_sums(rng, args.scale, args.reps)
    for name, size, t_np, t_nb in rows:
        if t_nb is None:
            print(f"{name:<20} {size:<18} {t_np * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>8}")
        else:
            print(
                f"{name:<20} {size:<18} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms "
                f"{t_np / t_nb:>7.1f}x"
            )


if __name__ == "__main__":
    main()
