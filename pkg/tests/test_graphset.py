import csv
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fgfusion.errors import ConfigError, DataError
from fgfusion.graphset import (
    RECORD_FIELDS,
    SYSTEM_REGISTRY,
    Edge,
    FailureModeId,
    FailureRecord,
    assemble,
    export,
    format_id,
    ingest_edges,
    ingest_records,
    load_dataset,
    parse_id,
    system_label,
)

REG_KEYS = sorted(SYSTEM_REGISTRY)


def _rec(id_text, **overrides):
    fid = parse_id(id_text)
    fields = dict(
        id=fid,
        system=system_label(fid),
        subsystem="cooling loop",
        component="pump",
        failure_mode="leak",
        failure_reason="seal wear",
        failure_effect="pressure drop",
        emergency_measure="isolate and switch to backup",
    )
    fields.update(overrides)
    return FailureRecord(**fields)


# --- ID codec ---------------------------------------------------------------


@given(
    st.sampled_from(REG_KEYS),
    st.integers(0, 99),
    st.integers(0, 99),
    st.integers(0, 99),
)
def test_id_round_trip(key, sub, comp, mode):
    fid = FailureModeId(
        category=key[0], system=key[1], subsystem=sub, component=comp, mode=mode
    )
    text = format_id(fid)
    assert len(text) == 8 and text.isdigit()
    assert parse_id(text) == fid
    assert format_id(parse_id(text)) == text


def test_id_exemplars():
    a = parse_id("11010101")
    assert (a.category, a.system, a.subsystem, a.component, a.mode) == (1, 1, 1, 1, 1)
    assert system_label(a) == "Target and Obstacle Perception System"
    b = parse_id("21010601")
    assert (b.category, b.system, b.subsystem, b.component, b.mode) == (2, 1, 1, 6, 1)
    assert system_label(b) == "Ship-to-Shore Communication System"


def test_id_parse_errors():
    with pytest.raises(DataError, match="8 ASCII digits"):
        parse_id("1101010")
    with pytest.raises(DataError, match="8 ASCII digits"):
        parse_id("110101011")
    with pytest.raises(DataError, match="8 ASCII digits"):
        parse_id("11o10101")
    with pytest.raises(DataError, match="category"):
        parse_id("41010101")
    with pytest.raises(DataError, match="no system registered"):
        parse_id("19010101")


def test_registry_has_twelve_distinct_labels():
    assert len(SYSTEM_REGISTRY) == 12
    assert len(set(SYSTEM_REGISTRY.values())) == 12
    for key in REG_KEYS:
        fid = FailureModeId(key[0], key[1], 0, 0, 0)
        assert system_label(fid) == SYSTEM_REGISTRY[key]


# --- record validation ------------------------------------------------------


def test_record_label_consistency():
    rec = _rec("11010101")
    assert rec.label == "Target and Obstacle Perception System"
    assert rec.id_text == "11010101"
    # label comparison normalizes case and runs of whitespace
    _rec("11010101", system="  target AND obstacle   perception system ")
    with pytest.raises(DataError, match="does not match the label"):
        _rec("11010101", system="Positioning System")
    with pytest.raises(DataError, match="'failure_mode' is empty"):
        _rec("11010101", failure_mode="   ")


def _write_csv(path, rows, header=RECORD_FIELDS):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _row(id_text, system=None):
    return [
        id_text,
        system if system is not None else system_label(parse_id(id_text)),
        "cooling loop",
        "pump",
        "leak",
        "seal wear",
        "pressure drop",
        "isolate",
    ]


def test_ingest_records_csv(tmp_path):
    path = tmp_path / "records.csv"
    _write_csv(path, [_row("11010101"), _row("12010101"), _row("31010101")])
    result = ingest_records(path)
    assert [r.id_text for r in result.records] == ["11010101", "12010101", "31010101"]
    assert result.skipped == []


def test_ingest_records_strict_vs_lenient(tmp_path):
    path = tmp_path / "records.csv"
    _write_csv(path, [_row("11010101"), _row("12010101", system="Wrong Label")])
    with pytest.raises(DataError, match=r"records\.csv:3"):
        ingest_records(path)
    result = ingest_records(path, strict=False)
    assert len(result.records) == 1
    assert len(result.skipped) == 1
    assert ":3:" in result.skipped[0]


def test_ingest_records_header_mismatch(tmp_path):
    path = tmp_path / "records.csv"
    _write_csv(path, [], header=("id", "name"))
    with pytest.raises(DataError, match="does not match the schema"):
        ingest_records(path)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(DataError, match="empty file"):
        ingest_records(empty)
    with pytest.raises(ConfigError, match="format"):
        ingest_records(path, fmt="xml")


def test_ingest_records_jsonl(tmp_path):
    path = tmp_path / "records.jsonl"
    good = dict(zip(RECORD_FIELDS, _row("11010101")))
    lines = [json.dumps(good), "{not json", json.dumps({"id": "11010101"})]
    path.write_text("\n".join(lines) + "\n")
    result = ingest_records(path, fmt="jsonl", strict=False)
    assert len(result.records) == 1
    assert len(result.skipped) == 2
    assert "invalid JSON" in result.skipped[0]
    assert "record schema" in result.skipped[1]
    with pytest.raises(DataError, match="invalid JSON"):
        ingest_records(path, fmt="jsonl")


# --- edges ------------------------------------------------------------------


def _write_edges(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "weight"])
        writer.writerows(rows)


def test_ingest_edges_basic(tmp_path):
    path = tmp_path / "edges.csv"
    _write_edges(path, [["11010101", "12010101", "0.8"], ["12010101", "11010101", "0.3"]])
    edges = ingest_edges(path)
    assert len(edges) == 2
    assert edges[0] == Edge(src="11010101", dst="12010101", weight=0.8)


def test_ingest_edges_undirected_merges_on_max(tmp_path):
    path = tmp_path / "edges.csv"
    _write_edges(
        path,
        [
            ["11010101", "12010101", "0.4"],
            ["12010101", "11010101", "0.9"],
            ["11010101", "21010101", "0.5"],
        ],
    )
    edges = ingest_edges(path, undirected=True)
    # 2 undirected connections, each emitted both ways
    assert len(edges) == 4
    by_pair = {(e.src, e.dst): e.weight for e in edges}
    assert by_pair[("11010101", "12010101")] == 0.9
    assert by_pair[("12010101", "11010101")] == 0.9
    assert by_pair[("11010101", "21010101")] == 0.5
    assert by_pair[("21010101", "11010101")] == 0.5


def test_ingest_edges_errors(tmp_path):
    path = tmp_path / "edges.csv"
    _write_edges(path, [["11010101", "12010101", "0.8"], ["11010101", "12010101", "0.5"]])
    with pytest.raises(DataError, match="duplicate edge"):
        ingest_edges(path)
    _write_edges(path, [["11010101", "11010101", "0.8"]])
    with pytest.raises(DataError, match="self-loop"):
        ingest_edges(path)
    _write_edges(path, [["11010101", "12010101", "1.5"]])
    with pytest.raises(DataError, match=r"outside \(0, 1\]"):
        ingest_edges(path)
    _write_edges(path, [["11010101", "12010101", "heavy"]])
    with pytest.raises(DataError, match="not a number"):
        ingest_edges(path)
    path.write_text("a,b,c\n")
    with pytest.raises(DataError, match="must be src,dst,weight"):
        ingest_edges(path)


# --- assembly ---------------------------------------------------------------


def _fixture_records():
    ids = (
        [f"1101{n:02d}01" for n in range(1, 8)]
        + [f"1201{n:02d}01" for n in range(1, 6)]
        + [f"2101{n:02d}01" for n in range(1, 4)]
    )
    return [_rec(i) for i in ids]


def test_assemble_stratified_split_quotas():
    records = _fixture_records()
    matrix = np.random.default_rng(0).normal(size=(len(records), 4))
    ds = assemble(records, matrix, [], split=(0.2, 0.2, 0.6), seed=7)
    assert set(ds.splits) == {r.id_text for r in records}
    by_label = {}
    for rec in records:
        by_label.setdefault(rec.label, []).append(rec.id_text)
    for label, members in by_label.items():
        n = len(members)
        counts = {"train": 0, "val": 0, "test": 0}
        for m in members:
            counts[ds.splits[m]] += 1
        assert sum(counts.values()) == n
        for name, frac in zip(("train", "val", "test"), (0.2, 0.2, 0.6)):
            assert abs(counts[name] - frac * n) <= 1.0


def test_assemble_deterministic_and_seed_sensitive():
    records = _fixture_records()
    matrix = np.random.default_rng(0).normal(size=(len(records), 4))
    a = assemble(records, matrix, [], seed=3)
    b = assemble(records, matrix, [], seed=3)
    assert a.splits == b.splits
    seen = {tuple(sorted(assemble(records, matrix, [], seed=s).splits.items())) for s in range(6)}
    assert len(seen) > 1


def test_assemble_validation():
    records = _fixture_records()
    matrix = np.zeros((len(records), 4))
    with pytest.raises(DataError, match="unknown record ids: 31010101"):
        assemble(records, matrix, [Edge("11010101", "31010101", 0.5)])
    with pytest.raises(DataError, match="rows"):
        assemble(records, matrix[:-1], [])
    with pytest.raises(DataError, match="duplicate record id"):
        assemble(records + [records[0]], np.zeros((len(records) + 1, 4)), [])
    with pytest.raises(ConfigError, match="3 fractions"):
        assemble(records, matrix, [], split=(0.5, 0.5))
    with pytest.raises(ConfigError, match="sum to 1"):
        assemble(records, matrix, [], split=(0.5, 0.2, 0.2))


# --- export and reload ------------------------------------------------------


def test_export_load_round_trip(tmp_path):
    records = _fixture_records()
    rng = np.random.default_rng(11)
    matrix = rng.normal(size=(len(records), 5))
    edges = [
        Edge("11010101", "11010201", 0.75),
        Edge("12010101", "21010101", 1.0 / 3.0),
    ]
    ds = assemble(records, matrix, edges, seed=9)
    ds.notes["width"] = "demo"
    paths = export(ds, tmp_path / "out")
    meta = json.loads((tmp_path / "out" / "meta.json").read_text())
    assert meta["nodes"] == len(records)
    assert meta["edges"] == 2
    assert meta["classes"] == 3
    assert sum(meta["split_counts"].values()) == len(records)

    loaded = load_dataset(tmp_path / "out")
    assert set(loaded.nodes) == set(ds.nodes)
    assert loaded.splits == ds.splits
    assert loaded.d_total == 5
    assert loaded.seed == 9
    assert loaded.notes == {"width": "demo"}
    for node_id, (vec, label) in ds.nodes.items():
        lvec, llabel = loaded.nodes[node_id]
        # repr round-trips floats exactly
        assert np.array_equal(lvec, vec)
        assert llabel == label
    assert sorted(loaded.edges, key=lambda e: (e.src, e.dst)) == sorted(
        ds.edges, key=lambda e: (e.src, e.dst)
    )
    assert set(paths) == {"nodes", "edges", "meta"}


def test_export_byte_stable(tmp_path):
    records = _fixture_records()
    matrix = np.random.default_rng(2).normal(size=(len(records), 3))
    ds = assemble(records, matrix, [Edge("11010101", "12010101", 0.5)], seed=1)
    export(ds, tmp_path / "a")
    export(ds, tmp_path / "b")
    for name in ("nodes.csv", "edges.csv", "meta.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_load_dataset_missing_meta(tmp_path):
    with pytest.raises(DataError, match="no meta.json"):
        load_dataset(tmp_path)
