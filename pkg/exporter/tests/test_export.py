"""Export job and CLI behaviour with the offline hash backend.

Conformance tests parse the output with the downstream package's own
reader, which is the interface contract: files it reads without a
single warning, keyed exactly by the record ids.
"""

import json
import warnings
from pathlib import Path

import numpy as np
import pytest
from fgfusion.embeddings import read_embeddings

from fgf_exporter import (
    SENTENCE_DIM,
    ExportJob,
    HashNgramEncoder,
    InputError,
    SetupError,
    run_export,
)
from fgf_exporter.cli import main
from fgf_exporter.records import read_records

IDS = {"11010101", "11010202", "21010601"}


def _job(records, out, **kw):
    kw.setdefault("backend", "hash")
    return ExportJob(records=records, out_dir=str(out), **kw)


def _read_clean(path):
    """Parse with the downstream reader and assert zero warnings."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        table = read_embeddings(path)
    assert caught == []
    return table


def test_sentence_fields_two_files_three_rows(records_csv, tmp_path):
    out = tmp_path / "out"
    report = run_export(
        _job(records_csv, out, fields=("failure_effect", "emergency_measure"))
    )
    files = sorted(p.name for p in out.iterdir())
    assert files == ["decision.vec", "effect.vec", "export_report.json"]
    for tag in ("effect", "decision"):
        table = _read_clean(out / f"{tag}.vec")
        assert table.dim == SENTENCE_DIM
        assert table.field == tag
        assert set(table.vectors) == IDS
    assert report["records"] == 3
    assert set(report["fields"]) == {"effect", "decision"}


def test_all_fields_key_sets_match_ids(records_csv, tmp_path):
    out = tmp_path / "out"
    run_export(_job(records_csv, out))
    for tag in ("mode", "reason", "effect", "decision"):
        table = _read_clean(out / f"{tag}.vec")
        assert set(table.vectors) == IDS


def test_identical_texts_identical_vectors(records_csv, tmp_path):
    # records 11010101 and 11010202 share the failure_mode text
    out = tmp_path / "out"
    run_export(_job(records_csv, out, fields=("failure_mode",)))
    table = _read_clean(out / "mode.vec")
    assert np.array_equal(table.vectors["11010101"], table.vectors["11010202"])
    assert not np.array_equal(table.vectors["11010101"], np.zeros(table.dim))


def test_file_values_round_trip_exactly(records_csv, tmp_path):
    out = tmp_path / "out"
    run_export(_job(records_csv, out, fields=("failure_effect",)))
    table = _read_clean(out / "effect.vec")
    records = read_records(records_csv)
    expected = HashNgramEncoder().encode_batch([r["failure_effect"] for r in records])
    for row, rec in zip(expected, records):
        assert np.array_equal(table.vectors[rec["id"]], row)


def test_reexport_is_bit_identical(records_csv, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    run_export(_job(records_csv, out_a))
    run_export(_job(records_csv, out_b))
    names = sorted(p.name for p in out_a.iterdir())
    assert names == sorted(p.name for p in out_b.iterdir())
    for name in names:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_related_pair_beats_unrelated_pair():
    # frozen as a monotone assertion, not exact values
    enc = HashNgramEncoder()
    vecs = enc.encode_batch(
        [
            "circuit board damage",
            "board physically damaged",
            "board damage",
            "GPS antenna misalignment",
        ]
    )

    def cos(a, b):
        return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))

    related = cos(vecs[0], vecs[1])
    unrelated = cos(vecs[2], vecs[3])
    assert related > unrelated
    assert related > 0.0


def test_empty_text_becomes_flagged_zero_row(records_with_empty, tmp_path):
    out = tmp_path / "out"
    report = run_export(_job(records_with_empty, out))
    table = _read_clean(out / "effect.vec")
    assert np.array_equal(table.vectors["11010202"], np.zeros(SENTENCE_DIM))
    assert not np.array_equal(table.vectors["11010101"], np.zeros(SENTENCE_DIM))
    assert report["zero_rows"]["effect"] == ["11010202"]
    for tag in ("mode", "reason", "decision"):
        assert report["zero_rows"][tag] == []
    on_disk = json.loads((out / "export_report.json").read_text())
    assert on_disk == report


def test_jsonl_records_accepted(records_csv, tmp_path):
    records = read_records(records_csv)
    jsonl = tmp_path / "records.jsonl"
    with open(jsonl, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    out = tmp_path / "out"
    run_export(_job(str(jsonl), out, fields=("failure_mode",)))
    assert set(_read_clean(out / "mode.vec").vectors) == IDS


@pytest.mark.parametrize(
    "breaker",
    [
        lambda rows: rows[:0],  # only the header, no records
        lambda rows: rows + [rows[0]],  # duplicate id
        lambda rows: rows + [[""] + list(rows[0][1:])],  # empty id
    ],
)
def test_bad_record_files_raise(records_csv, tmp_path, breaker):
    import csv as _csv

    with open(records_csv, encoding="utf-8", newline="") as fh:
        rows = list(_csv.reader(fh))
    header, body = rows[0], [list(r) for r in rows[1:]]
    broken = tmp_path / "broken.csv"
    with open(broken, "w", encoding="utf-8", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(header)
        writer.writerows(breaker(body))
    with pytest.raises(InputError):
        run_export(_job(str(broken), tmp_path / "out"))


def test_wrong_header_raises(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("id,name\n1,x\n", encoding="utf-8")
    with pytest.raises(InputError, match="schema"):
        run_export(_job(str(bad), tmp_path / "out"))


def test_missing_records_file_raises(tmp_path):
    with pytest.raises(InputError, match="not found"):
        run_export(_job(str(tmp_path / "nope.csv"), tmp_path / "out"))


def test_unknown_field_raises(records_csv, tmp_path):
    with pytest.raises(InputError, match="unknown field"):
        run_export(_job(records_csv, tmp_path / "out", fields=("subsystem",)))


def test_unknown_backend_raises(records_csv, tmp_path):
    with pytest.raises(SetupError, match="backend"):
        run_export(_job(records_csv, tmp_path / "out", backend="oracle"))


def test_cli_hash_export(records_csv, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(
        [
            "export",
            "--records",
            records_csv,
            "--fields",
            "failure_effect,emergency_measure",
            "--out",
            str(out),
            "--backend",
            "hash",
        ]
    )
    assert code == 0
    assert "2 file(s)" in capsys.readouterr().out
    assert (out / "effect.vec").is_file()
    assert (out / "decision.vec").is_file()
    assert (out / "export_report.json").is_file()


def test_cli_unknown_field_exits_2(records_csv, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(
            [
                "export",
                "--records",
                records_csv,
                "--fields",
                "failure_mode,bogus",
                "--out",
                str(tmp_path / "out"),
            ]
        )
    assert exc.value.code == 2


def test_cli_missing_records_exits_3(tmp_path, capsys):
    code = main(
        [
            "export",
            "--records",
            str(tmp_path / "nope.csv"),
            "--out",
            str(tmp_path / "out"),
            "--backend",
            "hash",
        ]
    )
    assert code == 3
    assert "not found" in capsys.readouterr().err


def test_cli_unloadable_model_exits_4(records_csv, tmp_path, capsys):
    code = main(
        [
            "export",
            "--records",
            records_csv,
            "--out",
            str(tmp_path / "out"),
            "--backend",
            "transformer",
            "--phrase-model",
            str(tmp_path / "no-such-model"),
            "--sentence-model",
            str(tmp_path / "no-such-model"),
        ]
    )
    assert code == 4
    err = capsys.readouterr().err
    # either the load fails or the optional backend deps are absent
    assert "cannot load encoder" in err or "needs torch" in err


def test_cli_no_command_exits_2(capsys):
    assert main([]) == 2
    assert "export" in capsys.readouterr().out


def test_exported_files_feed_downstream_loader(records_csv, tmp_path):
    """A full four-field export is a drop-in embed-stage artifact set."""
    out = tmp_path / "out"
    run_export(_job(records_csv, out))
    dims = {}
    for path in sorted(out.glob("*.vec")):
        table = _read_clean(path)
        dims[table.field] = table.dim
        assert set(table.vectors) == IDS
    assert dims == {
        "mode": SENTENCE_DIM,
        "reason": SENTENCE_DIM,
        "effect": SENTENCE_DIM,
        "decision": SENTENCE_DIM,
    }
