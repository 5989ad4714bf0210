"""Feature fusion: kernel PCA reduction, the three inter-feature
weights (hierarchy sigmoid, cross-attention row mass, action-verb
similarity), weighted block concatenation, z-scoring, and the weighted
cross-entropy loss.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from ._accel import pairwise_sq_dists
from .embeddings import tokenize
from .errors import ConfigError, DataError

__all__ = [
    "KpcaModel",
    "kpca_fit",
    "kpca_project",
    "weight_hierarchy",
    "weight_attention",
    "action_vectors",
    "weight_verbs",
    "FusionWeights",
    "FusedFeatureMatrix",
    "fuse",
    "standardize",
    "weighted_ce_loss",
    "fusion_class_weights",
    "frequency_class_weights",
    "load_verb_lexicon",
    "DEFAULT_VERBS",
]

DEFAULT_VERBS = (
    "inspect",
    "replace",
    "repair",
    "switch",
    "restart",
    "monitor",
    "isolate",
    "test",
    "weld",
    "adjust",
    "record",
    "dispatch",
)

FIELD_ORDER = ("subcom", "mode", "reason", "decision", "effect")


# ---------------------------------------------------------------------------
# kernel PCA
# ---------------------------------------------------------------------------


@dataclass
class KpcaModel:
    """Fitted kernel PCA: training set, scaled eigenvectors, centering stats.

    ``alphas`` are eigenvectors divided by sqrt(eigenvalue), so training
    projections come out as sqrt(lambda) times the unit eigenvector and
    per-component summed squared scores equal the eigenvalues.
    """

    kernel: str
    gamma: Optional[float]
    x_train: np.ndarray
    alphas: np.ndarray
    lambdas: np.ndarray
    k: int
    variance_ratio: float
    row_means: np.ndarray
    overall_mean: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "kernel": self.kernel,
                "gamma": self.gamma,
                "x_train": self.x_train.tolist(),
                "alphas": self.alphas.tolist(),
                "lambdas": self.lambdas.tolist(),
                "k": self.k,
                "variance_ratio": self.variance_ratio,
                "row_means": self.row_means.tolist(),
                "overall_mean": self.overall_mean,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "KpcaModel":
        d = json.loads(text)
        return cls(
            kernel=d["kernel"],
            gamma=d["gamma"],
            x_train=np.array(d["x_train"], dtype=float),
            alphas=np.array(d["alphas"], dtype=float),
            lambdas=np.array(d["lambdas"], dtype=float),
            k=d["k"],
            variance_ratio=d["variance_ratio"],
            row_means=np.array(d["row_means"], dtype=float),
            overall_mean=d["overall_mean"],
        )


def _kernel_matrix(x: np.ndarray, z: np.ndarray, kernel: str, gamma: Optional[float]):
    if kernel == "linear":
        return z @ x.T
    if kernel == "rbf":
        sq = (
            np.sum(z * z, axis=1)[:, None]
            + np.sum(x * x, axis=1)[None, :]
            - 2.0 * (z @ x.T)
        )
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ConfigError(f"unknown kernel {kernel!r}; expected 'rbf' or 'linear'")


def kpca_fit(
    vectors,
    kernel: str = "rbf",
    gamma: Optional[float] = None,
    target_variance: float = 0.95,
) -> KpcaModel:
    """Fit kernel PCA and keep the fewest components reaching the
    cumulative explained-variance target.

    The kernel matrix is double-centered, eigendecomposed, and trimmed
    to k = min{k : cumulative ratio >= target}.  Gamma defaults to one
    over the input dimension for the RBF kernel.  All-identical samples
    leave no variance to explain and raise a data error.
    """
    x = np.asarray(vectors, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DataError(f"need at least 2 samples to fit, got shape {x.shape}")
    if not (0.0 < target_variance <= 1.0):
        raise ConfigError(f"target_variance must be in (0,1], got {target_variance}")
    if kernel == "rbf" and gamma is None:
        gamma = 1.0 / x.shape[1]
    n = x.shape[0]
    if kernel == "rbf":
        kmat = np.exp(-gamma * pairwise_sq_dists(np.ascontiguousarray(x)))
    else:
        kmat = _kernel_matrix(x, x, kernel, gamma)
    row_means = kmat.mean(axis=1)
    overall = float(kmat.mean())
    kc = kmat - row_means[None, :] - row_means[:, None] + overall

    eigvals, eigvecs = np.linalg.eigh(kc)
    eigvals = eigvals[::-1]
    eigvecs = eigvecs[:, ::-1]
    if eigvals.min() < -1e-8 * max(1.0, abs(float(eigvals.max()))):
        eigvals = np.maximum(eigvals, 0.0)
    pos = np.maximum(eigvals, 0.0)
    total = float(pos.sum())
    if total <= 0.0 or float(pos[0]) <= 0.0:
        raise DataError("zero-variance input: all centered-kernel eigenvalues vanish")
    ratios = np.cumsum(pos) / total
    k = int(np.searchsorted(ratios, target_variance - 1e-12) + 1)
    k = min(k, int((pos > 0).sum()))
    alphas = eigvecs[:, :k] / np.sqrt(pos[:k])[None, :]
    return KpcaModel(
        kernel=kernel,
        gamma=gamma,
        x_train=x.copy(),
        alphas=alphas,
        lambdas=pos[:k].copy(),
        k=k,
        variance_ratio=float(ratios[k - 1]),
        row_means=row_means,
        overall_mean=overall,
    )


def kpca_project(model: KpcaModel, vectors) -> np.ndarray:
    """Project new vectors through the fitted model's centered kernel rows."""
    z = np.asarray(vectors, dtype=float)
    if z.ndim == 1:
        z = z[None, :]
    if z.shape[1] != model.x_train.shape[1]:
        raise DataError(
            f"vector length {z.shape[1]} does not match training dimension "
            f"{model.x_train.shape[1]}"
        )
    kt = _kernel_matrix(model.x_train, z, model.kernel, model.gamma)
    ktc = (
        kt
        - kt.mean(axis=1)[:, None]
        - model.row_means[None, :]
        + model.overall_mean
    )
    return ktc @ model.alphas


# ---------------------------------------------------------------------------
# the three weights
# ---------------------------------------------------------------------------


def weight_hierarchy(d_sub: float, d_com: float) -> float:
    """Sigmoid of the depth gap: 1/(1 + e^(d_sub - d_com))."""
    return 1.0 / (1.0 + math.exp(d_sub - d_com))


def weight_attention(mode_vecs, reason_vecs, rowwise: bool = False) -> np.ndarray:
    """Per-record attention mass, max-normalized to [0, 1].

    Scores are scaled dot products between mode (query) and reason (key)
    vectors.  By default the softmax runs over the whole score matrix so
    row sums can differ; ``rowwise=True`` applies the usual per-row
    softmax, which makes every row sum to 1 and the output constant.
    """
    q = np.asarray(mode_vecs, dtype=float)
    k = np.asarray(reason_vecs, dtype=float)
    if q.shape != k.shape or q.ndim != 2:
        raise ConfigError(f"mode {q.shape} and reason {k.shape} shapes must match")
    d_k = q.shape[1]
    if d_k == 0:
        raise ConfigError("attention dimension is zero")
    scores = (q @ k.T) / math.sqrt(d_k)
    if rowwise:
        z = scores - scores.max(axis=1, keepdims=True)
        e = np.exp(z)
        attn = e / e.sum(axis=1, keepdims=True)
    else:
        z = scores - scores.max()
        e = np.exp(z)
        attn = e / e.sum()
    w2 = attn.sum(axis=1)
    return w2 / w2.max()


def action_vectors(
    decision_texts: Sequence[str],
    decision_table: np.ndarray,
    verb_lexicon: Iterable[str],
    embedder: Callable[[str], np.ndarray],
) -> np.ndarray:
    """Mean embedding of the lexicon verbs found in each decision text.

    Matching is whole-token after casefolding.  A record with no match
    falls back to its full decision vector.
    """
    lexicon = {v.casefold() for v in verb_lexicon}
    if not lexicon:
        raise ConfigError("verb lexicon is empty")
    table = np.asarray(decision_table, dtype=float)
    if table.shape[0] != len(decision_texts):
        raise ConfigError("decision_table rows must match decision_texts length")
    out = np.empty_like(table)
    for i, text in enumerate(decision_texts):
        matched = sorted({t for t in tokenize(text) if t in lexicon})
        if matched:
            out[i] = np.mean([np.asarray(embedder(v), dtype=float) for v in matched], axis=0)
        else:
            out[i] = table[i]
    return out


def _cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    sim = a @ b.T
    denom = na[:, None] * nb[None, :]
    out = np.zeros_like(sim)
    ok = denom > 0.0
    out[ok] = sim[ok] / denom[ok]
    return out


def weight_verbs(
    decision_texts: Sequence[str],
    decision_table,
    effect_vecs,
    verb_lexicon: Iterable[str] = DEFAULT_VERBS,
    embedder: Optional[Callable[[str], np.ndarray]] = None,
) -> np.ndarray:
    """Action-verb similarity weight per record.

    Row i of the cosine matrix compares record i's action vector with
    every effect vector; the row sums are divided by their maximum.
    Zero-norm vectors contribute 0 to their pairs.  Results are clipped
    to [0, 1]; if no row sum is positive the weights degrade to all
    ones.
    """
    effects = np.asarray(effect_vecs, dtype=float)
    if embedder is None:
        from .embeddings import sentence_hash_embed

        def embedder(verb: str) -> np.ndarray:
            return sentence_hash_embed(verb, dim=effects.shape[1])

    actions = action_vectors(decision_texts, decision_table, verb_lexicon, embedder)
    if actions.shape[1] != effects.shape[1]:
        raise ConfigError(
            f"action dim {actions.shape[1]} does not match effect dim {effects.shape[1]}"
        )
    sums = _cosine_matrix(actions, effects).sum(axis=1)
    peak = float(sums.max())
    if peak <= 0.0:
        return np.ones(len(sums))
    return np.clip(sums / peak, 0.0, 1.0)


def load_verb_lexicon(path) -> List[str]:
    """One verb per line; # comments and blank lines skipped."""
    verbs: List[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            word = line.split("#", 1)[0].strip()
            if word:
                verbs.append(word.casefold())
    if not verbs:
        raise ConfigError(f"{path}: no verbs found")
    return verbs


# ---------------------------------------------------------------------------
# fusion
# ---------------------------------------------------------------------------


@dataclass
class FusionWeights:
    """The hierarchy scalar plus per-record attention and verb weights."""

    w1: float
    w2: np.ndarray
    w3: np.ndarray


@dataclass
class FusedFeatureMatrix:
    matrix: np.ndarray
    d_total: int
    k: int
    standardized: bool


def fuse(blocks: Sequence[Mapping[str, np.ndarray]], weights: FusionWeights) -> FusedFeatureMatrix:
    """Weighted concatenation, one row per record.

    Row layout: [subcom*w1 | mode*w2_i | reason*w2_i | decision*w3_i |
    effect*w3_i].  Every record must carry all five blocks with
    consistent widths.
    """
    n = len(blocks)
    if n == 0:
        raise DataError("no records to fuse")
    if len(weights.w2) != n or len(weights.w3) != n:
        raise ConfigError("weight vectors must have one entry per record")
    widths: Dict[str, int] = {}
    for i, rec in enumerate(blocks):
        for name in FIELD_ORDER:
            if name not in rec:
                raise DataError(f"record {i} is missing field block {name!r}")
            w = np.asarray(rec[name]).shape[-1]
            if name in widths and widths[name] != w:
                raise DataError(
                    f"record {i} field {name!r} has width {w}, expected {widths[name]}"
                )
            widths.setdefault(name, w)
    if widths["mode"] != widths["reason"]:
        raise DataError("mode and reason blocks must share one width")
    rows = []
    for i, rec in enumerate(blocks):
        rows.append(
            np.concatenate(
                [
                    np.asarray(rec["subcom"], dtype=float) * weights.w1,
                    np.asarray(rec["mode"], dtype=float) * weights.w2[i],
                    np.asarray(rec["reason"], dtype=float) * weights.w2[i],
                    np.asarray(rec["decision"], dtype=float) * weights.w3[i],
                    np.asarray(rec["effect"], dtype=float) * weights.w3[i],
                ]
            )
        )
    matrix = np.vstack(rows)
    return FusedFeatureMatrix(
        matrix=matrix,
        d_total=matrix.shape[1],
        k=widths["mode"],
        standardized=False,
    )


def standardize(matrix) -> np.ndarray:
    """Per-column z-score with population std; constant columns become 0."""
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DataError(f"need at least 2 rows to standardize, got shape {x.shape}")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    out = np.zeros_like(x)
    ok = std > 0.0
    out[:, ok] = (x[:, ok] - mean[ok]) / std[ok]
    return out


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------


def fusion_class_weights(
    labels,
    n_classes: int,
    w1: float,
    w2: np.ndarray,
    w3: np.ndarray,
    alpha: float = 1.0 / 3.0,
    beta: float = 1.0 / 3.0,
    gamma: float = 1.0 / 3.0,
) -> np.ndarray:
    """Per-class weights alpha*w1 + beta*mean(w2|class) + gamma*mean(w3|class)."""
    y = np.asarray(labels, dtype=np.int64)
    w2 = np.asarray(w2, dtype=float)
    w3 = np.asarray(w3, dtype=float)
    if len(w2) != len(y) or len(w3) != len(y):
        raise ConfigError("w2 and w3 must have one entry per label")
    out = np.empty(n_classes)
    for c in range(n_classes):
        members = y == c
        m2 = float(w2[members].mean()) if members.any() else 0.0
        m3 = float(w3[members].mean()) if members.any() else 0.0
        out[c] = alpha * w1 + beta * m2 + gamma * m3
    return out


def frequency_class_weights(labels, n_classes: int) -> np.ndarray:
    """Balanced inverse-frequency weights N/(C*count_c); absent classes get 0."""
    y = np.asarray(labels, dtype=np.int64)
    counts = np.bincount(y, minlength=n_classes).astype(float)
    out = np.zeros(n_classes)
    present = counts > 0
    out[present] = len(y) / (n_classes * counts[present])
    return out


def weighted_ce_loss(
    probs,
    labels,
    class_weights=None,
    alpha: float = 1.0 / 3.0,
    beta: float = 1.0 / 3.0,
    gamma: float = 1.0 / 3.0,
    w1: Optional[float] = None,
    w2_mean=None,
    w3_mean=None,
) -> float:
    """Mean class-weighted cross-entropy: -(1/N) sum_i w_{y_i} log p_{i,y_i}.

    Pass explicit ``class_weights`` or the pieces to build them
    (alpha*w1 + beta*w2_mean_c + gamma*w3_mean_c per class).  Predicted
    probabilities are clamped at 1e-12 before the log.
    """
    p = np.asarray(probs, dtype=float)
    y = np.asarray(labels, dtype=np.int64)
    if p.ndim != 2 or len(y) != p.shape[0]:
        raise ConfigError(f"probs shape {p.shape} does not match {len(y)} labels")
    row_sums = p.sum(axis=1)
    if np.any(np.abs(row_sums - 1.0) > 1e-6):
        bad = int(np.argmax(np.abs(row_sums - 1.0)))
        raise DataError(f"probability row {bad} sums to {row_sums[bad]}, expected 1")
    if y.min() < 0 or y.max() >= p.shape[1]:
        raise DataError("label outside the class range")
    if class_weights is None:
        if w1 is None or w2_mean is None or w3_mean is None:
            raise ConfigError("provide class_weights or all of w1, w2_mean, w3_mean")
        class_weights = (
            alpha * w1
            + beta * np.asarray(w2_mean, dtype=float)
            + gamma * np.asarray(w3_mean, dtype=float)
        )
    w = np.asarray(class_weights, dtype=float)
    if len(w) != p.shape[1]:
        raise ConfigError(f"{len(w)} class weights for {p.shape[1]} classes")
    picked = np.clip(p[np.arange(len(y)), y], 1e-12, None)
    return float(-(w[y] * np.log(picked)).mean())
