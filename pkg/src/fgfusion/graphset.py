"""Failure-record parsing, the 8-digit ID codec, graph assembly with
stratified splits, and dataset export/load.

The ID segments are (category, system, subsystem, component, mode) with
digit widths (1, 1, 2, 2, 2).  Category 1 covers basic ship systems,
2 the shore-interaction systems, 3 the intelligent systems; each
(category, system) pair maps to one of twelve system labels.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "FailureModeId",
    "FailureRecord",
    "Edge",
    "GraphDataset",
    "SYSTEM_REGISTRY",
    "parse_id",
    "format_id",
    "system_label",
    "ingest_records",
    "ingest_edges",
    "assemble",
    "export",
    "load_dataset",
    "RECORD_FIELDS",
]

SYSTEM_REGISTRY: Dict[Tuple[int, int], str] = {
    (1, 1): "Target and Obstacle Perception System",
    (1, 2): "Positioning System",
    (1, 3): "Side Propulsion System",
    (1, 4): "Power System",
    (1, 5): "Navigational Aid System",
    (2, 1): "Ship-to-Shore Communication System",
    (2, 2): "Shore-based Dispatch Communication System",
    (2, 3): "Shore-based Meteorological Service System",
    (2, 4): "Shore-based Remote Control Center",
    (3, 1): "Intelligent Navigation Control System",
    (3, 2): "Intelligent Energy Storage System",
    (3, 3): "Intelligent Cargo Hold System",
}

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

_ID_RE = re.compile(r"^[0-9]{8}$")


def _norm_label(text: str) -> str:
    return " ".join(text.casefold().split())


@dataclass(frozen=True)
class FailureModeId:
    category: int
    system: int
    subsystem: int
    component: int
    mode: int

    def __post_init__(self):
        if self.category not in (1, 2, 3):
            raise DataError(f"category must be 1, 2, or 3, got {self.category}")
        if not (0 <= self.system <= 9):
            raise DataError(f"system digit out of range: {self.system}")
        for name in ("subsystem", "component", "mode"):
            v = getattr(self, name)
            if not (0 <= v <= 99):
                raise DataError(f"{name} must fit in two digits, got {v}")
        if (self.category, self.system) not in SYSTEM_REGISTRY:
            raise DataError(
                f"no system registered for category {self.category}, "
                f"system {self.system}"
            )


def parse_id(text: str) -> FailureModeId:
    """Decode an 8-digit identifier into its five segments."""
    if not _ID_RE.match(text):
        raise DataError(f"id {text!r} is not exactly 8 ASCII digits")
    return FailureModeId(
        category=int(text[0]),
        system=int(text[1]),
        subsystem=int(text[2:4]),
        component=int(text[4:6]),
        mode=int(text[6:8]),
    )


def format_id(fid: FailureModeId) -> str:
    return (
        f"{fid.category}{fid.system}"
        f"{fid.subsystem:02d}{fid.component:02d}{fid.mode:02d}"
    )


def system_label(fid: FailureModeId) -> str:
    return SYSTEM_REGISTRY[(fid.category, fid.system)]


@dataclass(frozen=True)
class FailureRecord:
    id: FailureModeId
    system: str
    subsystem: str
    component: str
    failure_mode: str
    failure_reason: str
    failure_effect: str
    emergency_measure: str

    def __post_init__(self):
        for name in RECORD_FIELDS[1:]:
            if not getattr(self, name).strip():
                raise DataError(f"field {name!r} is empty")
        expected = system_label(self.id)
        if _norm_label(self.system) != _norm_label(expected):
            raise DataError(
                f"system {self.system!r} does not match the label "
                f"{expected!r} registered for id {format_id(self.id)}"
            )

    @property
    def label(self) -> str:
        return system_label(self.id)

    @property
    def id_text(self) -> str:
        return format_id(self.id)


@dataclass
class IngestResult:
    records: List[FailureRecord]
    skipped: List[str]


def _record_from_row(row: Dict[str, str]) -> FailureRecord:
    return FailureRecord(
        id=parse_id(str(row["id"]).strip()),
        system=str(row["system"]),
        subsystem=str(row["subsystem"]),
        component=str(row["component"]),
        failure_mode=str(row["failure_mode"]),
        failure_reason=str(row["failure_reason"]),
        failure_effect=str(row["failure_effect"]),
        emergency_measure=str(row["emergency_measure"]),
    )


def ingest_records(path, fmt: str = "csv", strict: bool = True) -> IngestResult:
    """Read and validate failure records.

    Strict mode raises on the first bad row; lenient mode skips bad rows
    and returns their error messages alongside the good records.  The
    header (csv) or key set (jsonl) must carry exactly the eight schema
    fields.
    """
    path = Path(path)
    if fmt not in ("csv", "jsonl"):
        raise ConfigError(f"format must be 'csv' or 'jsonl', got {fmt!r}")
    records: List[FailureRecord] = []
    skipped: List[str] = []

    def handle(lineno: int, row: Dict[str, str]):
        try:
            records.append(_record_from_row(row))
        except DataError as exc:
            msg = f"{path}:{lineno}: {exc}"
            if strict:
                raise DataError(msg) from None
            skipped.append(msg)

    if fmt == "csv":
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise DataError(f"{path}: empty file, expected a header row")
            if tuple(reader.fieldnames) != RECORD_FIELDS:
                raise DataError(
                    f"{path}: header {reader.fieldnames} does not match the "
                    f"schema {list(RECORD_FIELDS)}"
                )
            for lineno, row in enumerate(reader, start=2):
                if any(v is None for v in row.values()):
                    msg = f"{path}:{lineno}: row has fewer fields than the header"
                    if strict:
                        raise DataError(msg)
                    skipped.append(msg)
                    continue
                handle(lineno, row)
    else:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    msg = f"{path}:{lineno}: invalid JSON ({exc.msg})"
                    if strict:
                        raise DataError(msg) from None
                    skipped.append(msg)
                    continue
                if not isinstance(obj, dict) or set(obj) != set(RECORD_FIELDS):
                    msg = f"{path}:{lineno}: keys do not match the record schema"
                    if strict:
                        raise DataError(msg)
                    skipped.append(msg)
                    continue
                handle(lineno, obj)
    return IngestResult(records=records, skipped=skipped)


# ---------------------------------------------------------------------------
# edges
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    weight: float

    def __post_init__(self):
        if not _ID_RE.match(self.src) or not _ID_RE.match(self.dst):
            raise DataError(f"edge endpoints must be 8-digit ids: {self.src!r} -> {self.dst!r}")
        if self.src == self.dst:
            raise DataError(f"self-loop on {self.src}")
        if not (0.0 < self.weight <= 1.0):
            raise DataError(
                f"edge {self.src} -> {self.dst} weight {self.weight} outside (0, 1]"
            )


def ingest_edges(path, undirected: bool = False) -> List[Edge]:
    """Read (src, dst, weight) rows; duplicates and self-loops are errors.

    With ``undirected`` every connection is emitted in both directions,
    taking the max weight when a pair was given twice (once per
    direction).
    """
    path = Path(path)
    seen: Dict[Tuple[str, str], int] = {}
    edges: List[Edge] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file, expected a 'src,dst,weight' header")
        if [h.strip() for h in header] != ["src", "dst", "weight"]:
            raise DataError(f"{path}: header {header} must be src,dst,weight")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                weight = float(row[2])
            except ValueError:
                raise DataError(f"{path}:{lineno}: weight {row[2]!r} is not a number") from None
            try:
                edge = Edge(src=row[0].strip(), dst=row[1].strip(), weight=weight)
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            key = (edge.src, edge.dst)
            if key in seen:
                raise DataError(
                    f"{path}:{lineno}: duplicate edge {edge.src} -> {edge.dst} "
                    f"(first at line {seen[key]})"
                )
            seen[key] = lineno
            edges.append(edge)
    if undirected:
        merged: Dict[Tuple[str, str], float] = {}
        for e in edges:
            key = (min(e.src, e.dst), max(e.src, e.dst))
            merged[key] = max(merged.get(key, 0.0), e.weight)
        edges = []
        for (a, b), w in sorted(merged.items()):
            edges.append(Edge(src=a, dst=b, weight=w))
            edges.append(Edge(src=b, dst=a, weight=w))
    return edges


# ---------------------------------------------------------------------------
# assembly and export
# ---------------------------------------------------------------------------


@dataclass
class GraphDataset:
    nodes: Dict[str, Tuple[np.ndarray, str]]
    edges: List[Edge]
    splits: Dict[str, str]
    seed: int
    d_total: int
    notes: Dict[str, str]


SPLIT_NAMES = ("train", "val", "test")


def _stratified_split(
    ids_by_label: Dict[str, List[str]],
    fractions: Sequence[float],
    rng: np.random.Generator,
) -> Dict[str, str]:
    """Largest-remainder quota split per class, shuffled deterministically."""
    assignment: Dict[str, str] = {}
    for label in sorted(ids_by_label):
        members = sorted(ids_by_label[label])
        perm = rng.permutation(len(members))
        members = [members[i] for i in perm]
        n = len(members)
        quotas = [f * n for f in fractions]
        base = [int(q) for q in quotas]
        left = n - sum(base)
        remainders = sorted(
            range(len(fractions)), key=lambda i: (-(quotas[i] - base[i]), i)
        )
        for i in remainders[:left]:
            base[i] += 1
        pos = 0
        for split_name, count in zip(SPLIT_NAMES, base):
            for node_id in members[pos : pos + count]:
                assignment[node_id] = split_name
            pos += count
    return assignment


def assemble(
    records: Sequence[FailureRecord],
    fused_matrix,
    edges: Sequence[Edge],
    split: Sequence[float] = (0.2, 0.2, 0.6),
    seed: int = 0,
) -> GraphDataset:
    """Join records with their fused feature rows and split by class.

    Rows of ``fused_matrix`` align positionally with ``records``.  Every
    edge endpoint must be a record id.  The split is stratified per
    label with largest-remainder rounding, shuffled under the seed.
    """
    matrix = np.asarray(fused_matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != len(records):
        raise DataError(
            f"feature matrix has {matrix.shape[0] if matrix.ndim == 2 else '?'} rows "
            f"for {len(records)} records"
        )
    if len(split) != 3:
        raise ConfigError(f"split must have 3 fractions, got {len(split)}")
    if abs(sum(split) - 1.0) > 1e-9 or any(f < 0 for f in split):
        raise ConfigError(f"split fractions {tuple(split)} must be >= 0 and sum to 1")

    nodes: Dict[str, Tuple[np.ndarray, str]] = {}
    for i, rec in enumerate(records):
        node_id = rec.id_text
        if node_id in nodes:
            raise DataError(f"duplicate record id {node_id}")
        nodes[node_id] = (matrix[i], rec.label)

    dangling = sorted(
        {e.src for e in edges if e.src not in nodes}
        | {e.dst for e in edges if e.dst not in nodes}
    )
    if dangling:
        raise DataError(f"edges reference unknown record ids: {', '.join(dangling)}")

    ids_by_label: Dict[str, List[str]] = {}
    for node_id, (_, label) in nodes.items():
        ids_by_label.setdefault(label, []).append(node_id)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    splits = _stratified_split(ids_by_label, tuple(split), rng)
    return GraphDataset(
        nodes=nodes,
        edges=list(edges),
        splits=splits,
        seed=seed,
        d_total=matrix.shape[1],
        notes={},
    )


def export(dataset: GraphDataset, out_dir) -> Dict[str, str]:
    """Write nodes.csv, edges.csv, and meta.json; byte-stable per input."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    d = dataset.d_total
    nodes_path = out / "nodes.csv"
    with open(nodes_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label", "split"] + [f"f{i}" for i in range(d)])
        for node_id in sorted(dataset.nodes):
            vec, label = dataset.nodes[node_id]
            writer.writerow(
                [node_id, label, dataset.splits[node_id]]
                + [repr(float(v)) for v in vec]
            )
    edges_path = out / "edges.csv"
    with open(edges_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["src", "dst", "weight"])
        for e in sorted(dataset.edges, key=lambda e: (e.src, e.dst)):
            writer.writerow([e.src, e.dst, repr(e.weight)])
    labels = sorted({label for _, label in dataset.nodes.values()})
    split_counts = {name: 0 for name in SPLIT_NAMES}
    for name in dataset.splits.values():
        split_counts[name] += 1
    meta = {
        "nodes": len(dataset.nodes),
        "edges": len(dataset.edges),
        "classes": len(labels),
        "d_total": d,
        "label_names": labels,
        "seed": dataset.seed,
        "split_counts": split_counts,
        "notes": dict(dataset.notes),
    }
    meta_path = out / "meta.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return {"nodes": str(nodes_path), "edges": str(edges_path), "meta": str(meta_path)}


def load_dataset(in_dir) -> GraphDataset:
    """Read back an exported dataset directory."""
    src = Path(in_dir)
    meta_path = src / "meta.json"
    if not meta_path.exists():
        raise DataError(f"{src}: no meta.json; not an exported dataset directory")
    with open(meta_path, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    nodes: Dict[str, Tuple[np.ndarray, str]] = {}
    splits: Dict[str, str] = {}
    with open(src / "nodes.csv", "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = len(header) - 3
        for row in reader:
            node_id, label, split_name = row[0], row[1], row[2]
            vec = np.array([float(v) for v in row[3:]])
            if len(vec) != d:
                raise DataError(f"node {node_id}: {len(vec)} features, expected {d}")
            nodes[node_id] = (vec, label)
            splits[node_id] = split_name
    edges: List[Edge] = []
    with open(src / "edges.csv", "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            edges.append(Edge(src=row[0], dst=row[1], weight=float(row[2])))
    return GraphDataset(
        nodes=nodes,
        edges=edges,
        splits=splits,
        seed=meta.get("seed", 0),
        d_total=meta.get("d_total", len(next(iter(nodes.values()))[0]) if nodes else 0),
        notes=meta.get("notes", {}),
    )
