"""Failure-record input parsing.

The exporter consumes the same eight-column record files the graph
builder ingests, as CSV or JSONL. Validation here is deliberately
shallow: ids must be present and unique because they key the output
rows, while text fields may be empty. Empty fields are exported as
zero-vector rows and flagged in the sidecar report rather than
rejected, so a partially filled sheet still exports.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Dict, List

from .errors import InputError

RECORD_FIELDS = (
    "id",
    "system",
    "subsystem",
    "component",
    "failure_mode",
    "failure_reason",
    "failure_effect",
    "emergency_measure",
)

# record fields the exporter can encode, keyed to their output file tags
TEXT_FIELDS = (
    "failure_mode",
    "failure_reason",
    "failure_effect",
    "emergency_measure",
)


def read_records(path) -> List[Dict[str, str]]:
    """Load records from a CSV or JSONL file as a list of field dicts.

    The header (CSV) or key set (JSONL) must carry exactly the eight
    schema fields. Duplicate or empty ids raise InputError because the
    output files are keyed by id.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"records file not found: {path}")
    if path.suffix.lower() == ".jsonl":
        rows = _read_jsonl(path)
    else:
        rows = _read_csv(path)
    seen = set()
    for lineno, row in rows:
        rid = row.get("id", "").strip()
        if not rid:
            raise InputError(f"{path}:{lineno}: record has no id")
        if rid in seen:
            raise InputError(f"{path}:{lineno}: duplicate id {rid!r}")
        seen.add(rid)
        row["id"] = rid
    if not seen:
        raise InputError(f"{path}: no records")
    return [row for _, row in rows]


def _read_csv(path: Path):
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InputError(f"{path}: empty file, expected a header row")
        if tuple(reader.fieldnames) != RECORD_FIELDS:
            raise InputError(
                f"{path}: header {reader.fieldnames} does not match the "
                f"eight-column record schema {list(RECORD_FIELDS)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if None in row or any(v is None for v in row.values()):
                raise InputError(f"{path}:{lineno}: row width does not match the header")
            rows.append((lineno, {k: (v or "") for k, v in row.items()}))
    return rows


def _read_jsonl(path: Path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            if not isinstance(obj, dict) or set(obj) != set(RECORD_FIELDS):
                raise InputError(
                    f"{path}:{lineno}: keys must be exactly {sorted(RECORD_FIELDS)}"
                )
            rows.append((lineno, {k: str(obj[k]) for k in RECORD_FIELDS}))
    return rows
