"""Text encoder backends.

Two families:

* ``HashNgramEncoder`` is a deterministic character n-gram hashing
  encoder with no model weights and no external dependencies. It is the
  offline stand-in: stable across runs and machines, and texts sharing
  character n-grams get positively correlated vectors, which is enough
  for format, determinism and relatedness checks to be meaningful.

* ``PhraseEncoder`` and ``SentenceEncoder`` wrap a pretrained
  contextual model loaded through ``transformers``. Phrase fields use
  the first-token vector of the final layer (a mean-pool fallback flag
  is provided); sentence fields always use mean pooling over the final
  layer and must come out 384-dimensional. Model weights are never
  vendored: the identifier is a config string, either a hub name or a
  local directory.

Every encoder exposes ``dim`` and ``encode_batch(texts) -> (n, dim)``
float64 array. Encoders never see empty strings; the export job turns
those into zero-vector rows before batching.
"""

from __future__ import annotations

import hashlib
from typing import List, Sequence

import numpy as np

from .errors import SetupError

SENTENCE_DIM = 384  # sentence-field width is fixed, not configurable


class HashNgramEncoder:
    """Hash character n-grams into a fixed-width signed bucket vector."""

    name = "hash"

    def __init__(self, dim: int = SENTENCE_DIM, ngram: Sequence[int] = (3, 4, 5)):
        if dim < 1:
            raise SetupError(f"dim must be positive, got {dim}")
        self.dim = int(dim)
        self.ngram = tuple(int(n) for n in ngram)
        if not self.ngram or min(self.ngram) < 1:
            raise SetupError(f"n-gram sizes must be positive, got {ngram!r}")

    def encode_batch(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim))
        for i, text in enumerate(texts):
            out[i] = self._encode(text)
        return out

    def _encode(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        padded = f" {' '.join(text.casefold().split())} "
        for n in self.ngram:
            for start in range(len(padded) - n + 1):
                gram = padded[start : start + n]
                digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
                bucket = int.from_bytes(digest[:7], "big") % self.dim
                sign = 1.0 if digest[7] % 2 == 0 else -1.0
                vec[bucket] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec


class _TransformerBase:
    """Shared loading and batched forward pass for the contextual backends."""

    def __init__(self, model_id: str, batch_size: int = 32):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:  # torch/transformers are optional deps
            raise SetupError(
                f"the transformer backend needs torch and transformers installed: {exc}"
            ) from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model_id)
            self._model = AutoModel.from_pretrained(model_id)
        except Exception as exc:
            raise SetupError(f"cannot load encoder {model_id!r}: {exc}") from exc
        self._torch = torch
        self._model.eval()
        self.model_id = model_id
        self.dim = int(self._model.config.hidden_size)
        if batch_size < 1:
            raise SetupError(f"batch_size must be positive, got {batch_size}")
        self.batch_size = int(batch_size)

    def _hidden_batches(self, texts: Sequence[str]):
        """Yield (last_hidden_state, attention_mask) per batch, no grad."""
        torch = self._torch
        with torch.no_grad():
            for start in range(0, len(texts), self.batch_size):
                chunk = list(texts[start : start + self.batch_size])
                enc = self._tokenizer(
                    chunk, padding=True, truncation=True, return_tensors="pt"
                )
                out = self._model(**enc)
                yield out.last_hidden_state, enc["attention_mask"]

    @staticmethod
    def _masked_mean(hidden, mask):
        mask = mask.unsqueeze(-1).to(hidden.dtype)
        total = (hidden * mask).sum(dim=1)
        count = mask.sum(dim=1).clamp(min=1.0)
        return total / count


class PhraseEncoder(_TransformerBase):
    """Contextual encoder for short phrase fields.

    Pools the first-token vector of the final layer; ``mean_pool=True``
    switches to a mask-weighted mean over all tokens instead. Output
    width is whatever the model's hidden size is; the downstream
    dimensionality reduction chooses its own target width.
    """

    name = "phrase"

    def __init__(self, model_id: str, batch_size: int = 32, mean_pool: bool = False):
        super().__init__(model_id, batch_size=batch_size)
        self.mean_pool = bool(mean_pool)

    def encode_batch(self, texts: Sequence[str]) -> np.ndarray:
        chunks: List[np.ndarray] = []
        for hidden, mask in self._hidden_batches(texts):
            if self.mean_pool:
                pooled = self._masked_mean(hidden, mask)
            else:
                pooled = hidden[:, 0, :]
            chunks.append(pooled.double().numpy())
        if not chunks:
            return np.zeros((0, self.dim))
        return np.vstack(chunks)


class SentenceEncoder(_TransformerBase):
    """Mean-pooling sentence encoder; output width must be 384."""

    name = "sentence"

    def __init__(self, model_id: str, batch_size: int = 32):
        super().__init__(model_id, batch_size=batch_size)
        if self.dim != SENTENCE_DIM:
            raise SetupError(
                f"sentence encoder {model_id!r} is {self.dim}-dimensional, "
                f"sentence fields require {SENTENCE_DIM}"
            )

    def encode_batch(self, texts: Sequence[str]) -> np.ndarray:
        chunks: List[np.ndarray] = []
        for hidden, mask in self._hidden_batches(texts):
            chunks.append(self._masked_mean(hidden, mask).double().numpy())
        if not chunks:
            return np.zeros((0, self.dim))
        return np.vstack(chunks)
