"""Cross-checks between the numba kernels and their numpy twins.

The two builds must agree to floating-point accumulation order on the
same inputs.  When numba is unavailable the comparisons are skipped and
only the dispatch plumbing is checked.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from fgfusion import _accel
from fgfusion._accel import (
    HAS_NUMBA,
    assign_labels_numpy,
    backend,
    cluster_dist_sums_numpy,
    pairwise_sq_dists_numpy,
    sgns_epoch_numpy,
)

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not importable")


def _sgns_inputs(seed=0, n_vocab=12, dim=6, n_pairs=40, n_neg=3):
    rng = np.random.default_rng(seed)
    w_in = rng.normal(scale=0.1, size=(n_vocab, dim))
    w_out = rng.normal(scale=0.1, size=(n_vocab, dim))
    centers = rng.integers(0, n_vocab, size=n_pairs)
    contexts = rng.integers(0, n_vocab, size=n_pairs)
    negatives = rng.integers(0, n_vocab, size=(n_pairs, n_neg))
    lrs = rng.uniform(0.01, 0.05, size=n_pairs)
    return w_in, w_out, centers, contexts, negatives, lrs


@needs_numba
def test_sgns_epoch_backends_agree():
    w_in_a, w_out_a, centers, contexts, negatives, lrs = _sgns_inputs()
    w_in_b, w_out_b = w_in_a.copy(), w_out_a.copy()
    sgns_epoch_numpy(w_in_a, w_out_a, centers, contexts, negatives, lrs)
    _accel._sgns_epoch_numba(w_in_b, w_out_b, centers, contexts, negatives, lrs)
    # same pair order, same clamp; only summation order differs
    assert np.allclose(w_in_a, w_in_b, atol=1e-12)
    assert np.allclose(w_out_a, w_out_b, atol=1e-12)


@needs_numba
def test_pairwise_sq_dists_backends_agree():
    rng = np.random.default_rng(3)
    x = np.ascontiguousarray(rng.normal(size=(25, 7)))
    a = pairwise_sq_dists_numpy(x)
    b = _accel._pairwise_sq_dists_numba(x)
    assert np.allclose(a, b, atol=1e-10)
    assert np.array_equal(np.diag(b), np.zeros(25))
    assert np.array_equal(b, b.T)


@needs_numba
def test_assign_labels_backends_agree():
    rng = np.random.default_rng(5)
    x = np.ascontiguousarray(rng.normal(size=(30, 4)))
    centers = np.ascontiguousarray(rng.normal(size=(6, 4)))
    la, ia = assign_labels_numpy(x, centers)
    lb, ib = _accel._assign_labels_numba(x, centers)
    assert np.array_equal(la, lb)
    assert ia == pytest.approx(ib, rel=1e-12)


@needs_numba
def test_cluster_dist_sums_backends_agree():
    rng = np.random.default_rng(7)
    x = np.ascontiguousarray(rng.normal(size=(20, 3)))
    dists = np.sqrt(pairwise_sq_dists_numpy(x))
    labels = rng.integers(0, 4, size=20).astype(np.int64)
    a = cluster_dist_sums_numpy(dists, labels, 4)
    b = _accel._cluster_dist_sums_numba(np.ascontiguousarray(dists), labels, 4)
    assert np.allclose(a, b, atol=1e-10)


def test_backend_name_matches_flag():
    assert backend() == ("numba" if _accel.USE_NUMBA else "numpy")


def test_env_flag_forces_numpy_backend():
    code = "from fgfusion._accel import backend; print(backend())"
    env = dict(os.environ, FGF_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "numpy"


def test_pairwise_numpy_properties():
    rng = np.random.default_rng(11)
    x = rng.normal(size=(10, 5))
    d = pairwise_sq_dists_numpy(x)
    assert np.all(d >= 0.0)
    i, j = 2, 7
    assert d[i, j] == pytest.approx(float(np.sum((x[i] - x[j]) ** 2)), rel=1e-12)
