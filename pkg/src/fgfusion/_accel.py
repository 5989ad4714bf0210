"""Hot numeric kernels: numba-compiled with pure-numpy fallbacks.

Every kernel ships in two functionally equivalent versions, a numba
``@njit`` build and a pure-numpy build.  Which one runs is decided by
``USE_NUMBA``: numba must import cleanly and the ``FGF_NO_NUMBA``
environment variable must be unset/empty.  Results are deterministic
within a backend; across backends they agree to floating-point
accumulation order (see ``benchmarks/bench_kernels.py`` for the timing
comparison).

All randomness is pre-drawn by callers and passed in as arrays, so the
kernels themselves are pure functions of their inputs.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - environment without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap

    prange = range  # type: ignore[assignment]


def _env_disabled() -> bool:
    return os.environ.get("FGF_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


USE_NUMBA = HAS_NUMBA and not _env_disabled()


def backend() -> str:
    """Name of the kernel backend active for the next dispatched call."""
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# skip-gram negative-sampling epoch
# ---------------------------------------------------------------------------

_SIGMOID_CLAMP = 30.0


def sgns_epoch_numpy(w_in, w_out, centers, contexts, negatives, lrs):
    """One SGD pass over pre-drawn (center, context, negatives) triples.

    Mutates ``w_in``/``w_out`` in place. ``negatives`` has one row of
    negative word ids per pair; ``lrs`` is the per-pair learning rate.
    Targets update sequentially within a pair: a negative id that
    repeats (or collides with the context) sees the earlier update, the
    same schedule the compiled build walks.
    """
    n_pairs = centers.shape[0]
    for p in range(n_pairs):
        c = centers[p]
        lr = lrs[p]
        targets = np.empty(negatives.shape[1] + 1, dtype=np.int64)
        targets[0] = contexts[p]
        targets[1:] = negatives[p]
        dv = np.zeros(w_in.shape[1])
        for t, target in enumerate(targets):
            score = float(w_in[c] @ w_out[target])
            if score > _SIGMOID_CLAMP:
                score = _SIGMOID_CLAMP
            elif score < -_SIGMOID_CLAMP:
                score = -_SIGMOID_CLAMP
            f = 1.0 / (1.0 + np.exp(-score))
            label = 1.0 if t == 0 else 0.0
            g = (label - f) * lr
            dv += g * w_out[target]
            w_out[target] += g * w_in[c]
        w_in[c] += dv


@njit(cache=True)
def _sgns_epoch_numba(w_in, w_out, centers, contexts, negatives, lrs):
    n_pairs = centers.shape[0]
    n_neg = negatives.shape[1]
    dim = w_in.shape[1]
    dv = np.empty(dim)
    for p in range(n_pairs):
        c = centers[p]
        lr = lrs[p]
        for d in range(dim):
            dv[d] = 0.0
        for t in range(n_neg + 1):
            if t == 0:
                target = contexts[p]
                label = 1.0
            else:
                target = negatives[p, t - 1]
                label = 0.0
            score = 0.0
            for d in range(dim):
                score += w_in[c, d] * w_out[target, d]
            if score > _SIGMOID_CLAMP:
                score = _SIGMOID_CLAMP
            elif score < -_SIGMOID_CLAMP:
                score = -_SIGMOID_CLAMP
            f = 1.0 / (1.0 + np.exp(-score))
            g = (label - f) * lr
            for d in range(dim):
                dv[d] += g * w_out[target, d]
                w_out[target, d] += g * w_in[c, d]
        for d in range(dim):
            w_in[c, d] += dv[d]


def sgns_epoch(w_in, w_out, centers, contexts, negatives, lrs):
    if USE_NUMBA:
        _sgns_epoch_numba(w_in, w_out, centers, contexts, negatives, lrs)
    else:
        sgns_epoch_numpy(w_in, w_out, centers, contexts, negatives, lrs)


# ---------------------------------------------------------------------------
# pairwise squared Euclidean distances
# ---------------------------------------------------------------------------


def pairwise_sq_dists_numpy(x):
    sq = np.sum(x * x, axis=1)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


@njit(cache=True, parallel=True)
def _pairwise_sq_dists_numba(x):
    n, dim = x.shape
    d = np.zeros((n, n))
    for i in prange(n):
        for j in range(i + 1, n):
            acc = 0.0
            for f in range(dim):
                diff = x[i, f] - x[j, f]
                acc += diff * diff
            d[i, j] = acc
            d[j, i] = acc
    return d


def pairwise_sq_dists(x):
    if USE_NUMBA:
        return _pairwise_sq_dists_numba(np.ascontiguousarray(x))
    return pairwise_sq_dists_numpy(x)


# ---------------------------------------------------------------------------
# k-means assignment step
# ---------------------------------------------------------------------------


def assign_labels_numpy(x, centers):
    sq_x = np.sum(x * x, axis=1)[:, None]
    sq_c = np.sum(centers * centers, axis=1)[None, :]
    d = sq_x + sq_c - 2.0 * (x @ centers.T)
    np.maximum(d, 0.0, out=d)
    labels = np.argmin(d, axis=1)
    inertia = float(d[np.arange(x.shape[0]), labels].sum())
    return labels.astype(np.int64), inertia


@njit(cache=True)
def _assign_labels_numba(x, centers):
    n, dim = x.shape
    k = centers.shape[0]
    labels = np.empty(n, dtype=np.int64)
    inertia = 0.0
    for i in range(n):
        best = 0
        best_d = np.inf
        for c in range(k):
            acc = 0.0
            for f in range(dim):
                diff = x[i, f] - centers[c, f]
                acc += diff * diff
            if acc < best_d:
                best_d = acc
                best = c
        labels[i] = best
        inertia += best_d
    return labels, inertia


def assign_labels(x, centers):
    if USE_NUMBA:
        return _assign_labels_numba(
            np.ascontiguousarray(x), np.ascontiguousarray(centers)
        )
    return assign_labels_numpy(x, centers)


# ---------------------------------------------------------------------------
# per-sample summed distance to every cluster (silhouette helper)
# ---------------------------------------------------------------------------


def cluster_dist_sums_numpy(dists, labels, n_clusters):
    n = dists.shape[0]
    sums = np.zeros((n, n_clusters))
    for c in range(n_clusters):
        mask = labels == c
        sums[:, c] = dists[:, mask].sum(axis=1)
    return sums


@njit(cache=True)
def _cluster_dist_sums_numba(dists, labels, n_clusters):
    n = dists.shape[0]
    sums = np.zeros((n, n_clusters))
    for i in range(n):
        for j in range(n):
            sums[i, labels[j]] += dists[i, j]
    return sums


def cluster_dist_sums(dists, labels, n_clusters):
    if USE_NUMBA:
        return _cluster_dist_sums_numba(
            np.ascontiguousarray(dists), np.ascontiguousarray(labels), n_clusters
        )
    return cluster_dist_sums_numpy(dists, labels, n_clusters)
