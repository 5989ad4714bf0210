"""Embedding file writer.

Matches the downstream reader byte for byte: one header line
``#dim=<D> field=<tag>``, then ``key<TAB>v1 v2 ...`` rows with keys
sorted and values rendered via repr() so floats round-trip exactly.
"""

from __future__ import annotations

from typing import Dict

import numpy as np

from .errors import ExportError


def write_vec(path, dim: int, field: str, vectors: Dict[str, np.ndarray]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#dim={dim} field={field}\n")
        for key in sorted(vectors):
            vec = np.asarray(vectors[key], dtype=float)
            if vec.shape != (dim,):
                raise ExportError(
                    f"vector for {key!r} has shape {vec.shape}, expected ({dim},)"
                )
            fh.write(key + "\t" + " ".join(repr(float(v)) for v in vec) + "\n")
