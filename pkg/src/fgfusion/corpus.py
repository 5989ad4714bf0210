"""Document acquisition (live arXiv Atom API or offline JSONL) and match profiles."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
import urllib.error
import urllib.parse
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError, StageError

__all__ = [
    "Document",
    "MatchProfile",
    "fetch_arxiv",
    "load_offline",
    "save_offline",
    "dedup",
    "match_counts",
    "cache_dir",
]

logger = logging.getLogger(__name__)

ARXIV_API_URL = "http://export.arxiv.org/api/query"
ATOM_NS = {"atom": "http://www.w3.org/2005/Atom"}

# Upstream etiquette: at least this many seconds between live requests.
REQUEST_SPACING_S = 3.0
MAX_RETRIES = 3

_last_request_at = 0.0


@dataclass(frozen=True)
class Document:
    """One retrieved paper: metadata only, no full text."""

    id: str
    title: str
    abstract: str
    pdf_url: str = ""
    source: str = "offline"
    relevant: Optional[bool] = None

    def __post_init__(self):
        if not self.id:
            raise DataError("document id must be non-empty")
        if not self.title:
            raise DataError(f"document {self.id!r} has an empty title")


@dataclass(frozen=True)
class MatchProfile:
    """Per-keyword match counts. ``counts[i, j]`` = occurrences of pool
    keyword i in title+abstract of document j."""

    pool: tuple
    doc_ids: tuple
    counts: np.ndarray

    def __post_init__(self):
        if self.counts.shape != (len(self.pool), len(self.doc_ids)):
            raise DataError(
                "match profile shape "
                f"{self.counts.shape} != ({len(self.pool)}, {len(self.doc_ids)})"
            )


def cache_dir(override: str | Path | None = None) -> Path:
    """Resolve the fetch cache directory (FGF_CACHE_DIR wins over default)."""
    if override is not None:
        return Path(override)
    env = os.environ.get("FGF_CACHE_DIR", "").strip()
    if env:
        return Path(env)
    return Path.home() / ".cache" / "fgfusion"


def _normalize_query(query: str) -> str:
    return " ".join(query.split()).casefold()


def _cache_key(query: str, start: int, max_results: int) -> str:
    normalized = f"{_normalize_query(query)}|start={start}|max={max_results}"
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


def _http_get(url: str) -> bytes:
    """GET with politeness spacing and bounded exponential retry."""
    global _last_request_at
    delay = REQUEST_SPACING_S
    last_error: Exception | None = None
    for attempt in range(MAX_RETRIES):
        wait = _last_request_at + REQUEST_SPACING_S - time.monotonic()
        if wait > 0:
            time.sleep(wait)
        try:
            _last_request_at = time.monotonic()
            with urllib.request.urlopen(url, timeout=30) as resp:
                return resp.read()
        except (urllib.error.URLError, OSError) as exc:
            last_error = exc
            logger.warning("request attempt %d failed: %s", attempt + 1, exc)
            time.sleep(delay)
            delay *= 2
    raise StageError(f"request failed after {MAX_RETRIES} attempts: {last_error}")


def _parse_atom(payload: bytes, source_name: str) -> List[Document]:
    try:
        root = ET.fromstring(payload)
    except ET.ParseError as exc:
        raise DataError(f"malformed Atom feed from {source_name}: {exc}") from exc
    docs = []
    for index, entry in enumerate(root.findall("atom:entry", ATOM_NS)):
        id_el = entry.find("atom:id", ATOM_NS)
        title_el = entry.find("atom:title", ATOM_NS)
        summary_el = entry.find("atom:summary", ATOM_NS)
        if id_el is None or not (id_el.text or "").strip():
            raise DataError(f"feed entry {index} has no id element")
        if title_el is None or not (title_el.text or "").strip():
            raise DataError(f"feed entry {index} ({id_el.text}) has no title")
        pdf_url = ""
        for link in entry.findall("atom:link", ATOM_NS):
            if link.get("title") == "pdf" or link.get("type") == "application/pdf":
                pdf_url = link.get("href", "")
                break
        docs.append(
            Document(
                id=id_el.text.strip(),
                title=" ".join(title_el.text.split()),
                abstract=" ".join((summary_el.text or "").split())
                if summary_el is not None
                else "",
                pdf_url=pdf_url,
                source="arxiv",
            )
        )
    return docs


def fetch_arxiv(
    query: str,
    max_results: int,
    cache_dir_path: str | Path | None = None,
    start: int = 0,
) -> List[Document]:
    """Query the arXiv Atom API, caching raw responses on disk.

    A repeated call with identical (normalized) query parameters is served
    from the cache with no network I/O.
    """
    if not (1 <= max_results <= 2000):
        raise ConfigError(f"max_results must be in [1, 2000], got {max_results}")
    cache_root = cache_dir(cache_dir_path)
    cache_root.mkdir(parents=True, exist_ok=True)
    cache_file = cache_root / f"arxiv-{_cache_key(query, start, max_results)}.atom"
    if cache_file.exists():
        payload = cache_file.read_bytes()
    else:
        params = urllib.parse.urlencode(
            {"search_query": query, "start": start, "max_results": max_results}
        )
        payload = _http_get(f"{ARXIV_API_URL}?{params}")
        cache_file.write_bytes(payload)
    docs = _parse_atom(payload, source_name=f"query {query!r}")
    return docs[:max_results]


def load_offline(path: str | Path) -> List[Document]:
    """Load a JSONL corpus: one object per line with id/title/abstract/pdf_url."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")
    docs = []
    with path.open(encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise DataError(f"{path}:{lineno}: record is not an object")
            missing = [k for k in ("id", "title", "abstract") if k not in obj]
            if missing:
                raise DataError(
                    f"{path}:{lineno}: missing field(s) {', '.join(missing)}"
                )
            relevant = obj.get("relevant")
            if relevant is not None and not isinstance(relevant, bool):
                raise DataError(f"{path}:{lineno}: relevant must be a boolean")
            try:
                docs.append(
                    Document(
                        id=str(obj["id"]),
                        title=str(obj["title"]),
                        abstract=str(obj["abstract"]),
                        pdf_url=str(obj.get("pdf_url", "")),
                        source=str(obj.get("source", "offline")),
                        relevant=relevant,
                    )
                )
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    return docs


def save_offline(docs: Sequence[Document], path: str | Path) -> None:
    """Write documents in the offline JSONL record format (stable key order)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for doc in docs:
            record: Dict[str, object] = {
                "id": doc.id,
                "title": doc.title,
                "abstract": doc.abstract,
                "pdf_url": doc.pdf_url,
                "source": doc.source,
            }
            if doc.relevant is not None:
                record["relevant"] = doc.relevant
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            handle.write("\n")


def _dedup_key(doc: Document) -> str:
    normalized = " ".join(doc.title.split()).casefold()
    normalized += "\x1f" + " ".join(doc.abstract.split()).casefold()
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


def dedup(docs: Sequence[Document]) -> List[Document]:
    """Drop documents whose normalized (title, abstract) hash was seen before."""
    seen = set()
    kept = []
    for doc in docs:
        key = _dedup_key(doc)
        if key in seen:
            continue
        seen.add(key)
        kept.append(doc)
    return kept


def _word_pattern(keyword: str) -> re.Pattern:
    # Whole-word match: no letter/digit may touch either end of the keyword,
    # so "ship" does not match inside "shipping" but does match "ship-board".
    return re.compile(
        r"(?<![0-9A-Za-z])" + re.escape(keyword) + r"(?![0-9A-Za-z])",
        re.IGNORECASE,
    )


def match_counts(docs: Sequence[Document], pool: Sequence[str]) -> MatchProfile:
    """Case-insensitive whole-word occurrence counts per (keyword, document)."""
    if not pool:
        raise ConfigError("keyword pool is empty")
    patterns = [_word_pattern(k) for k in pool]
    counts = np.zeros((len(pool), len(docs)), dtype=np.int64)
    for j, doc in enumerate(docs):
        text = f"{doc.title}\n{doc.abstract}"
        for i, pattern in enumerate(patterns):
            counts[i, j] = len(pattern.findall(text))
    return MatchProfile(
        pool=tuple(pool), doc_ids=tuple(d.id for d in docs), counts=counts
    )
