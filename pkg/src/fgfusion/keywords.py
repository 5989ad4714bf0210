"""Domain keyword taxonomy: synonym expansion and frequency-driven weights."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Sequence, Tuple

from .errors import ConfigError

__all__ = [
    "KeywordTaxonomy",
    "KeywordWeights",
    "expand_keywords",
    "update_weights",
    "load_taxonomy",
    "default_taxonomy_path",
]


@dataclass(frozen=True)
class KeywordTaxonomy:
    """Base keywords with synonym groups and the expanded token pool.

    ``pool`` holds every base keyword and synonym exactly once
    (case-folded, order-stable); ``group_of`` maps each pool token to the
    index of the group that first introduced it.
    """

    groups: Tuple[Tuple[str, Tuple[str, ...]], ...]
    pool: Tuple[str, ...] = field(init=False)
    group_of: Dict[str, int] = field(init=False)

    def __post_init__(self):
        pool = []
        group_of: Dict[str, int] = {}
        for gi, (base, synonyms) in enumerate(self.groups):
            for token in (base, *synonyms):
                token = token.strip().casefold()
                if not token:
                    continue
                if token not in group_of:
                    group_of[token] = gi
                    pool.append(token)
        object.__setattr__(self, "pool", tuple(pool))
        object.__setattr__(self, "group_of", group_of)


@dataclass(frozen=True)
class KeywordWeights:
    """Normalized per-token weights; sums to 1 whenever any count is nonzero."""

    weights: Dict[str, float]

    def vector(self, pool: Sequence[str]):
        import numpy as np

        return np.array([self.weights[t] for t in pool])


def expand_keywords(taxonomy: KeywordTaxonomy) -> Tuple[str, ...]:
    """Case-folded, order-stable, deduplicated token pool.

    Each base keyword precedes its synonyms; a token appearing in two
    groups is owned by the first.
    """
    if not taxonomy.groups or not taxonomy.pool:
        raise ConfigError("keyword taxonomy is empty")
    return taxonomy.pool


def update_weights(frequencies: Mapping[str, float]) -> KeywordWeights:
    """Normalize raw counts into weights; all-zero counts become uniform."""
    if not frequencies:
        raise ConfigError("cannot weight an empty keyword set")
    for token, count in frequencies.items():
        if count < 0:
            raise ConfigError(f"negative frequency for keyword {token!r}")
    total = float(sum(frequencies.values()))
    if total == 0.0:
        uniform = 1.0 / len(frequencies)
        return KeywordWeights({t: uniform for t in frequencies})
    return KeywordWeights({t: f / total for t, f in frequencies.items()})


def load_taxonomy(path: str | Path) -> KeywordTaxonomy:
    """Parse the plain-text table format: one `base: syn1, syn2, ...` per line.

    Blank lines and lines starting with `#` are ignored.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"taxonomy file not found: {path}")
    groups = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        base, sep, rest = line.partition(":")
        base = base.strip()
        if not base:
            raise ConfigError(f"{path}:{lineno}: group line has no base keyword")
        synonyms = tuple(
            tok.strip() for tok in rest.split(",") if tok.strip()
        ) if sep else ()
        groups.append((base, synonyms))
    if not groups:
        raise ConfigError(f"taxonomy file {path} defines no keyword groups")
    return KeywordTaxonomy(tuple(groups))


def default_taxonomy_path() -> Path:
    """Path of the taxonomy file shipped with the package."""
    return Path(__file__).parent / "data" / "taxonomy.txt"
