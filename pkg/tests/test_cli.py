import hashlib
import json
from pathlib import Path

import pytest

from fgfusion.cli import build_parser, main

MINI_CFG = {
    "optimizer": {"n_nests": 8, "iterations": 6},
    "embed": {"dim": 16, "epochs": 2},
}

SPEC_FLAGS = (
    "--config",
    "--seed",
    "--threads",
    "--out",
    "--source",
    "--query",
    "--max-results",
    "--algo",
    "--no-softmax",
    "--sweep-dims",
    "--rowwise-attention",
    "--no-standardize",
    "--undirected",
    "--class-weights",
    "FGF_CACHE_DIR",
    "FGF_NO_NUMBA",
)

SUBCOMMANDS = (
    "fetch",
    "optimize",
    "evaluate",
    "embed",
    "fuse",
    "build-graph",
    "validate",
    "report",
)


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Run the whole pipeline once on a small config; tests inspect the tree."""
    root = tmp_path_factory.mktemp("cli_pipeline")
    cfg_path = root / "config.json"
    cfg_path.write_text(json.dumps(MINI_CFG))
    out = root / "out"
    base = ["--config", str(cfg_path), "--out", str(out)]
    assert main(["fetch"] + base) == 0
    for algo in ("hncsa", "csa", "nsga2"):
        assert main(["optimize", "--algo", algo, "--seed", "5"] + base) == 0
    assert main(["evaluate"] + base) == 0
    assert main(["embed"] + base) == 0
    assert main(["fuse", "--seed", "5"] + base) == 0
    assert main(["build-graph", "--seed", "5"] + base) == 0
    assert main(["validate"] + base) == 0
    return {"out": out, "base": base, "cfg": cfg_path}


def test_help_lists_every_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    for flag in SPEC_FLAGS:
        assert flag in text, flag
    for sub in SUBCOMMANDS:
        assert sub in text, sub


def test_subcommand_help_flags():
    parser = build_parser()
    # per-stage flags parse where they belong
    args = parser.parse_args(["embed", "--no-softmax", "--sweep-dims", "10,20"])
    assert args.no_softmax and args.sweep_dims == "10,20"
    args = parser.parse_args(["fuse", "--rowwise-attention", "--no-standardize"])
    assert args.rowwise_attention and args.no_standardize
    args = parser.parse_args(["build-graph", "--undirected", "--seed", "1"])
    assert args.undirected
    args = parser.parse_args(["validate", "--class-weights", "frequency"])
    assert args.class_weights == "frequency"


def test_no_command_prints_help_and_exits_2(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().out.lower()


def test_pipeline_artifacts(pipeline):
    out = pipeline["out"]
    assert (out / "corpus" / "corpus.jsonl").exists()
    for algo in ("hncsa", "csa", "nsga2"):
        assert (out / "optimize" / f"run_{algo}.json").exists()
    assert (out / "evaluate" / "metrics.json").exists()
    assert (out / "fuse" / "fused.npy").exists()
    assert (out / "graph" / "nodes.csv").exists()
    assert (out / "validate" / "validation.json").exists()


def test_manifests_carry_hash_and_seed(pipeline):
    out = pipeline["out"]
    manifest = json.loads((out / "optimize" / "manifest.json").read_text())
    assert manifest["stage"] == "optimize"
    assert manifest["seed"] == 5
    assert len(manifest["config_hash"]) == 64
    for digest in manifest["inputs"].values():
        assert digest.startswith("sha256:") and len(digest) == 71
    fetch_manifest = json.loads((out / "corpus" / "manifest.json").read_text())
    # same config, same hash across stages
    assert fetch_manifest["config_hash"] == manifest["config_hash"]


def test_optimize_rerun_is_byte_identical(pipeline):
    out = pipeline["out"]
    target = out / "optimize" / "run_hncsa.json"
    before = hashlib.sha256(target.read_bytes()).hexdigest()
    assert main(["optimize", "--algo", "hncsa", "--seed", "5"] + pipeline["base"]) == 0
    after = hashlib.sha256(target.read_bytes()).hexdigest()
    assert before == after


def test_report_prints_measured_vs_published(pipeline, capsys):
    assert main(["report"] + pipeline["base"]) == 0
    text = capsys.readouterr().out
    # published reference column values
    assert "0.153" in text
    assert "0.641" in text
    # the fused-width note surfaces both the formula and published numbers
    assert "1110" in text
    assert "1210" in text
    assert (pipeline["out"] / "report" / "report.json").exists()


def test_missing_seed_exits_2(tmp_path, capsys):
    code = main(["optimize", "--algo", "hncsa", "--out", str(tmp_path / "o")])
    assert code == 2
    assert "seed" in capsys.readouterr().err


def test_missing_corpus_exits_3_naming_fetch(tmp_path, capsys):
    code = main(["optimize", "--algo", "hncsa", "--seed", "1", "--out", str(tmp_path / "o")])
    assert code == 3
    assert "fgfusion fetch" in capsys.readouterr().err


def test_fuse_without_embed_names_prior_stage(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["fetch", "--out", str(out)]) == 0
    code = main(["fuse", "--seed", "1", "--out", str(out)])
    assert code == 3
    err = capsys.readouterr().err
    assert "run `fgfusion embed` first" in err


def test_report_without_stages_exits_3(tmp_path, capsys):
    code = main(["report", "--out", str(tmp_path / "empty")])
    assert code == 3
    assert "fgfusion fetch" in capsys.readouterr().err


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"optimzer": {"n_nests": 4}}))
    code = main(["fetch", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "optimzer" in capsys.readouterr().err


def test_bad_threads_exits_2(tmp_path, capsys):
    code = main(["fetch", "--threads", "0", "--out", str(tmp_path / "o")])
    assert code == 2
    assert "--threads" in capsys.readouterr().err


def test_missing_config_file_exits_2(tmp_path, capsys):
    code = main(["fetch", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")])
    assert code == 2


def test_embed_sweep_writes_summary(tmp_path):
    out = tmp_path / "o"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(MINI_CFG))
    base = ["--config", str(cfg), "--out", str(out)]
    assert main(["fetch"] + base) == 0
    assert main(["embed", "--sweep-dims", "8,12"] + base) == 0
    sweep = json.loads((out / "embed" / "sweep.json").read_text())
    dims = [row["dim"] for row in sweep["sweep"]]
    assert dims == [8, 12]
