"""Dataset quality metrics: blockwise cosine similarity, k-means
clustering, and the silhouette coefficient.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ._accel import assign_labels, cluster_dist_sums, pairwise_sq_dists
from .errors import ConfigError, DataError

__all__ = [
    "SimilarityReport",
    "cosine_block_stats",
    "KmeansResult",
    "kmeans",
    "silhouette",
    "DESIGNATED_PAIRS",
]

DESIGNATED_PAIRS = (("sub", "com"), ("mode", "reason"), ("effect", "decision"))


@dataclass
class SimilarityReport:
    """Mean cosines within each field and across designated field pairs."""

    block_means: Dict[str, float]
    within_means: Dict[str, Optional[float]]
    diag_mean: float
    offdiag_mean: float
    zero_norm_counts: Dict[str, int]

    def to_json(self) -> str:
        return json.dumps(
            {
                "block_means": self.block_means,
                "within_means": self.within_means,
                "diag_mean": self.diag_mean,
                "offdiag_mean": self.offdiag_mean,
                "zero_norm_counts": self.zero_norm_counts,
            },
            sort_keys=True,
            indent=1,
        )


def _unit_rows(block: np.ndarray) -> Tuple[np.ndarray, int]:
    """Rows scaled to unit norm with zero-norm rows dropped (and counted)."""
    norms = np.linalg.norm(block, axis=1)
    keep = norms > 0.0
    dropped = int((~keep).sum())
    return block[keep] / norms[keep, None], dropped


def cosine_block_stats(
    blocks: Mapping[str, np.ndarray],
    pairs: Sequence[Tuple[str, str]] = DESIGNATED_PAIRS,
) -> SimilarityReport:
    """Average pairwise cosines within fields and across field pairs.

    Within-field means run over i != j; cross-field means run over all
    (i, j).  Zero-norm vectors are excluded from every mean and counted
    per field.  Pairs must name present blocks of matching dimension.
    """
    units: Dict[str, np.ndarray] = {}
    zero_counts: Dict[str, int] = {}
    for name, block in blocks.items():
        arr = np.asarray(block, dtype=float)
        if arr.ndim != 2:
            raise ConfigError(f"block {name!r} must be 2-D, got shape {arr.shape}")
        units[name], zero_counts[name] = _unit_rows(arr)

    within: Dict[str, Optional[float]] = {}
    for name, u in units.items():
        n = u.shape[0]
        if n < 2:
            within[name] = None
            continue
        sims = u @ u.T
        within[name] = float((sims.sum() - np.trace(sims)) / (n * (n - 1)))

    cross: Dict[str, float] = {}
    for a, b in pairs:
        if a not in units or b not in units:
            missing = a if a not in units else b
            raise ConfigError(f"pair ({a}, {b}) names a missing block {missing!r}")
        ua, ub = units[a], units[b]
        if ua.shape[1] != ub.shape[1]:
            raise ConfigError(
                f"blocks {a!r} ({ua.shape[1]}d) and {b!r} ({ub.shape[1]}d) "
                "cannot be compared"
            )
        if ua.shape[0] == 0 or ub.shape[0] == 0:
            raise DataError(f"pair ({a}, {b}) has no usable vectors")
        cross[f"{a}-{b}"] = float((ua @ ub.T).mean())

    usable_within = [v for v in within.values() if v is not None]
    diag = float(np.mean(usable_within)) if usable_within else math.nan
    offdiag = float(np.mean(list(cross.values()))) if cross else math.nan
    return SimilarityReport(
        block_means=cross,
        within_means=within,
        diag_mean=diag,
        offdiag_mean=offdiag,
        zero_norm_counts=zero_counts,
    )


# ---------------------------------------------------------------------------
# clustering
# ---------------------------------------------------------------------------


@dataclass
class KmeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    n_iter: int


def kmeans(features, k: int = 12, seed: int = 0, max_iter: int = 300) -> KmeansResult:
    """Lloyd iterations from a k-means++ start, deterministic under seed.

    Stops when assignments stop changing or at ``max_iter``.  An emptied
    cluster is re-centered on the point farthest from its current
    center.
    """
    x = np.ascontiguousarray(np.asarray(features, dtype=float))
    if x.ndim != 2:
        raise ConfigError(f"features must be 2-D, got shape {x.shape}")
    n = x.shape[0]
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if k > n:
        raise ConfigError(f"k={k} exceeds the {n} available rows")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            centers[c] = x[rng.integers(n)]
        else:
            centers[c] = x[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((x - centers[c]) ** 2, axis=1))

    labels = np.full(n, -1, dtype=np.int64)
    inertia = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        new_labels, inertia = assign_labels(x, np.ascontiguousarray(centers))
        for c in range(k):
            members = new_labels == c
            if members.any():
                centers[c] = x[members].mean(axis=0)
            else:
                dist_own = np.sum((x - centers[new_labels]) ** 2, axis=1)
                far = int(np.argmax(dist_own))
                centers[c] = x[far]
                new_labels[far] = c
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    final_labels, inertia = assign_labels(x, np.ascontiguousarray(centers))
    return KmeansResult(labels=final_labels, centers=centers, inertia=float(inertia), n_iter=it)


def silhouette(features, labels, per_label: bool = False):
    """Mean silhouette (b - a)/max(a, b) under Euclidean distance.

    Samples in singleton clusters score 0.  A single distinct label is
    an error.  With ``per_label`` the per-cluster means come back too.
    """
    x = np.ascontiguousarray(np.asarray(features, dtype=float))
    y = np.asarray(labels)
    if x.ndim != 2 or len(y) != x.shape[0]:
        raise ConfigError(f"features shape {x.shape} does not match {len(y)} labels")
    names, codes = np.unique(y, return_inverse=True)
    k = len(names)
    if k < 2:
        raise DataError("silhouette needs at least 2 distinct labels")
    sizes = np.bincount(codes, minlength=k)
    dists = np.sqrt(np.maximum(pairwise_sq_dists(x), 0.0))
    sums = cluster_dist_sums(dists, codes.astype(np.int64), k)

    scores = np.zeros(len(y))
    for i in range(len(y)):
        c = codes[i]
        if sizes[c] <= 1:
            scores[i] = 0.0
            continue
        a = sums[i, c] / (sizes[c] - 1)
        b = math.inf
        for other in range(k):
            if other != c and sizes[other] > 0:
                b = min(b, sums[i, other] / sizes[other])
        top = max(a, b)
        scores[i] = 0.0 if top == 0.0 else (b - a) / top
    overall = float(scores.mean())
    if not per_label:
        return overall
    per = {
        str(names[c]): float(scores[codes == c].mean()) for c in range(k)
    }
    return overall, per
