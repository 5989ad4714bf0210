"""Token, phrase, and sentence embeddings.

Three backends cover the record fields: a skip-gram negative-sampling
model trained on local text (token level, used for the subsystem and
component fields), a seeded hash embedding that needs no training and
is stable across platforms, and external tables loaded from disk.
Aggregation helpers turn token vectors into gram, phrase, and sentence
vectors.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ._accel import sgns_epoch
from .errors import ConfigError, DataError

__all__ = [
    "tokenize",
    "ngrams",
    "TfidfStats",
    "tfidf",
    "aggregate_subcom",
    "train_sgns",
    "hash_embed",
    "phrase_embed",
    "sentence_hash_embed",
    "EmbeddingTable",
    "read_embeddings",
    "write_embeddings",
]


def tokenize(text: str) -> List[str]:
    """Casefold and split on whitespace."""
    return text.casefold().split()


def ngrams(tokens: Sequence[str], n: int) -> List[Tuple[str, ...]]:
    """Contiguous n-grams; a sequence shorter than n yields itself whole."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    toks = tuple(tokens)
    if not toks:
        return []
    if len(toks) < n:
        return [toks]
    return [toks[i : i + n] for i in range(len(toks) - n + 1)]


def tfidf(tf: float, n_docs: int, df: int) -> float:
    """tf * ln(N / (df + 1)); the +1 keeps ubiquitous terms finite."""
    if n_docs < 1:
        raise ConfigError(f"n_docs must be >= 1, got {n_docs}")
    if df < 0 or tf < 0:
        raise ConfigError("tf and df must be non-negative")
    return float(tf) * math.log(n_docs / (df + 1))


@dataclass
class TfidfStats:
    """Document frequencies gathered once, queried per token."""

    n_docs: int
    df: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_documents(cls, documents: Iterable[Sequence[str]]) -> "TfidfStats":
        df: Dict[str, int] = {}
        n = 0
        for tokens in documents:
            n += 1
            for tok in set(tokens):
                df[tok] = df.get(tok, 0) + 1
        if n == 0:
            raise DataError("cannot build tf-idf statistics from zero documents")
        return cls(n_docs=n, df=df)

    def weight(self, token: str, tf: float = 1.0) -> float:
        return tfidf(tf, self.n_docs, self.df.get(token, 0))


def aggregate_subcom(
    grams: Sequence[Sequence[str]],
    vectors: Mapping[str, np.ndarray],
    token_weights: Mapping[str, float],
    softmax: bool = True,
) -> np.ndarray:
    """Fuse gram vectors into one field vector.

    Each gram's vector and weight are the means over its member tokens;
    grams are then combined as a weight-normalized sum.  If the weights
    sum to zero or less the combination falls back to a plain mean.  A
    componentwise softmax (on by default) maps the result onto the
    simplex.  Tokens missing from ``vectors`` are an error.
    """
    if not grams:
        raise ConfigError("no grams to aggregate")
    gram_vecs = []
    gram_wts = []
    for gram in grams:
        if not gram:
            raise ConfigError("empty gram")
        missing = [t for t in gram if t not in vectors]
        if missing:
            raise DataError(f"no vector for token {missing[0]!r}")
        gram_vecs.append(np.mean([np.asarray(vectors[t], dtype=float) for t in gram], axis=0))
        gram_wts.append(float(np.mean([token_weights.get(t, 0.0) for t in gram])))
    mat = np.stack(gram_vecs)
    wts = np.asarray(gram_wts)
    total = float(wts.sum())
    if total > 0.0:
        out = (wts[:, None] * mat).sum(axis=0) / total
    else:
        out = mat.mean(axis=0)
    if softmax:
        z = out - out.max()
        e = np.exp(z)
        out = e / e.sum()
    return out


# ---------------------------------------------------------------------------
# skip-gram with negative sampling
# ---------------------------------------------------------------------------


def train_sgns(
    sentences: Sequence[Sequence[str]],
    dim: int = 100,
    window: int = 5,
    min_count: int = 1,
    epochs: int = 5,
    negatives: int = 5,
    lr: float = 0.025,
    min_lr: float = 1e-4,
    seed: int = 0,
) -> "EmbeddingTable":
    """Train token vectors on tokenized sentences.

    Deterministic under a fixed seed: every random draw (window widths,
    negative samples) happens up front with a seeded generator, and the
    update kernel consumes the pre-drawn arrays in a fixed order, so the
    accelerated and plain paths walk identical schedules.  Vocabulary
    order is by descending count then token; the final vectors are the
    input matrix rows.
    """
    if dim < 1 or window < 1 or epochs < 1 or negatives < 0:
        raise ConfigError("dim, window, epochs must be >= 1 and negatives >= 0")
    counts = Counter(tok for sent in sentences for tok in sent)
    vocab = [t for t, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])) if c >= min_count]
    if not vocab:
        raise DataError("vocabulary is empty after the min_count filter")
    index = {t: i for i, t in enumerate(vocab)}
    encoded = [
        np.array([index[t] for t in sent if t in index], dtype=np.int64)
        for sent in sentences
    ]
    encoded = [s for s in encoded if len(s) > 1]

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    w_in = (rng.random((len(vocab), dim)) - 0.5) / dim
    w_out = np.zeros((len(vocab), dim))

    # unigram^0.75 negative-sampling distribution, sampled by inverse CDF
    noise = np.array([counts[t] for t in vocab], dtype=float) ** 0.75
    cum = np.cumsum(noise / noise.sum())
    cum[-1] = 1.0

    epoch_pairs: List[Tuple[np.ndarray, np.ndarray]] = []
    for _ in range(epochs):
        centers: List[int] = []
        contexts: List[int] = []
        for sent in encoded:
            widths = rng.integers(1, window + 1, size=len(sent))
            for pos in range(len(sent)):
                w = int(widths[pos])
                lo = max(0, pos - w)
                hi = min(len(sent), pos + w + 1)
                for ctx in range(lo, hi):
                    if ctx != pos:
                        centers.append(int(sent[pos]))
                        contexts.append(int(sent[ctx]))
        epoch_pairs.append(
            (np.array(centers, dtype=np.int64), np.array(contexts, dtype=np.int64))
        )

    total_pairs = sum(len(c) for c, _ in epoch_pairs)
    if total_pairs == 0:
        raise DataError("no training pairs: all sentences have fewer than 2 known tokens")
    done = 0
    for centers, contexts in epoch_pairs:
        n_pairs = len(centers)
        if n_pairs == 0:
            continue
        neg = np.searchsorted(cum, rng.random((n_pairs, negatives))).astype(np.int64)
        lrs = np.maximum(
            min_lr, lr * (1.0 - (done + np.arange(n_pairs, dtype=float)) / total_pairs)
        )
        sgns_epoch(w_in, w_out, centers, contexts, neg, lrs)
        done += n_pairs

    return EmbeddingTable(
        dim=dim,
        field="token",
        vectors={t: w_in[i].copy() for t, i in index.items()},
    )


# ---------------------------------------------------------------------------
# hash embeddings
# ---------------------------------------------------------------------------


def hash_embed(token: str, dim: int, seed: int = 0) -> np.ndarray:
    """Unit vector derived from sha256 of (seed, token); platform stable."""
    if dim < 1:
        raise ConfigError(f"dim must be >= 1, got {dim}")
    digest = hashlib.sha256(f"{seed}:{token}".encode("utf-8")).digest()
    key = int.from_bytes(digest[:8], "big")
    gen = np.random.Generator(np.random.PCG64(key))
    vec = gen.normal(0.0, 1.0, dim)
    norm = float(np.linalg.norm(vec))
    return vec / norm if norm > 0 else vec


def phrase_embed(text: str, vectors: Mapping[str, np.ndarray], dim: int) -> np.ndarray:
    """Mean of available token vectors; no tokens (or none known) gives zeros."""
    toks = [t for t in tokenize(text) if t in vectors]
    if not toks:
        return np.zeros(dim)
    return np.mean([np.asarray(vectors[t], dtype=float) for t in toks], axis=0)


def sentence_hash_embed(text: str, dim: int = 384, seed: int = 0) -> np.ndarray:
    """L2-normalized mean of unit token hash vectors; empty text gives zeros."""
    toks = tokenize(text)
    if not toks:
        return np.zeros(dim)
    mean = np.mean([hash_embed(t, dim, seed) for t in toks], axis=0)
    norm = float(np.linalg.norm(mean))
    return mean / norm if norm > 0 else mean


# ---------------------------------------------------------------------------
# table persistence
# ---------------------------------------------------------------------------


class EmbeddingTable:
    """A keyed set of equal-dimension vectors with a field tag."""

    def __init__(self, dim: int, field: str, vectors: Optional[Dict[str, np.ndarray]] = None):
        self.dim = dim
        self.field = field
        self.vectors = {} if vectors is None else vectors

    def __repr__(self) -> str:
        return f"EmbeddingTable(dim={self.dim}, field={self.field!r}, n={len(self.vectors)})"

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, key: str) -> bool:
        return key in self.vectors

    def get(self, key: str) -> np.ndarray:
        try:
            return self.vectors[key]
        except KeyError:
            raise DataError(f"no embedding for key {key!r}") from None


def write_embeddings(path, table: EmbeddingTable):
    """One header line ``#dim=<D> field=<tag>`` then ``key\\tv1 v2 ...`` rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#dim={table.dim} field={table.field}\n")
        for key in sorted(table.vectors):
            vec = np.asarray(table.vectors[key], dtype=float)
            if vec.shape != (table.dim,):
                raise DataError(
                    f"vector for {key!r} has shape {vec.shape}, expected ({table.dim},)"
                )
            fh.write(key + "\t" + " ".join(repr(float(v)) for v in vec) + "\n")


def read_embeddings(path) -> EmbeddingTable:
    """Inverse of write_embeddings; malformed rows name their line number."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("#dim="):
            raise DataError(f"{path}:1: missing '#dim=<D> field=<tag>' header")
        try:
            head = dict(part.split("=", 1) for part in header[1:].split())
            dim = int(head["dim"])
            tag = head["field"]
        except (ValueError, KeyError) as exc:
            raise DataError(f"{path}:1: bad header {header!r}") from exc
        vectors: Dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise DataError(f"{path}:{lineno}: expected 'key<TAB>values'")
            key, payload = line.split("\t", 1)
            parts = payload.split()
            if len(parts) != dim:
                raise DataError(
                    f"{path}:{lineno}: {len(parts)} values for {key!r}, expected {dim}"
                )
            try:
                vectors[key] = np.array([float(p) for p in parts])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-numeric value") from exc
    return EmbeddingTable(dim=dim, field=tag, vectors=vectors)
