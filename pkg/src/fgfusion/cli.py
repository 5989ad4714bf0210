"""Pipeline driver.

Each subcommand runs one stage and drops its artifacts plus a manifest
under ``<out>/<stage>/``.  Manifests carry the resolved-config hash, the
seed, and sha256 digests of every input and output, so re-running a
stage with unchanged inputs rewrites identical bytes.  Stages find
their upstream artifacts by convention; a missing one names the command
that produces it.

Exit codes: 0 ok, 2 config error, 3 data error, 4 runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ConfigError, DataError, FgfError, StageError

SENTENCE_DIM = 384  # sentence-field width is fixed, not configurable

_FLAG_INDEX = """\
flags by subcommand:
  global (all)   --config PATH  --seed N  --threads N  --out DIR
  fetch          --source {offline,live}  --query TEXT  --max-results N
  optimize       --algo {hncsa,csa,nsga2}
  evaluate       (globals only)
  embed          --no-softmax  --sweep-dims D1,D2,...
  fuse           --rowwise-attention  --no-standardize
  build-graph    --undirected
  validate       --class-weights {fusion,frequency}
  report         (globals only)

environment:
  FGF_CACHE_DIR   cache directory for live fetches
  FGF_NO_NUMBA=1  force the pure-numpy kernel path
"""

STAGES = (
    "fetch",
    "optimize",
    "evaluate",
    "embed",
    "fuse",
    "build-graph",
    "validate",
    "report",
)

# directory name per stage under the artifact root
STAGE_DIRS = {
    "fetch": "corpus",
    "optimize": "optimize",
    "evaluate": "evaluate",
    "embed": "embed",
    "fuse": "fuse",
    "build-graph": "graph",
    "validate": "validate",
    "report": "report",
}

FIELD_TAGS = ("sub", "com", "subcom", "mode", "reason", "decision", "effect")

# measured-vs-published columns for the report stage
PUBLISHED_REFERENCE = {
    "hypervolume": {"hncsa": 0.153, "csa": 0.147, "nsga2": 0.145},
    "retrieval": {"recall": 0.64, "precision": 0.59, "f1": 0.61},
    "block_means": {"sub-com": 0.72, "mode-reason": 0.65, "effect-decision": 0.68},
    "silhouette": 0.641,
    "dataset": {"nodes": 1262, "edges": 6150, "classes": 12},
    "fused_width": {"k": 121, "published": 1210, "layout": 1110},
}


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------


def _data(name: str) -> Path:
    return Path(__file__).parent / "data" / name


DEFAULT_CONFIG: Dict[str, object] = {
    "taxonomy": None,  # None = packaged taxonomy.txt
    "corpus": {
        "source": "offline",
        "path": None,  # None = packaged corpus_200.jsonl
        "query": "autonomous cargo ship failure",
        "max_results": 200,
    },
    "records": None,  # None = packaged records_demo.csv
    "edges": None,  # None = packaged edges_demo.csv
    "verbs": None,  # None = packaged verbs.txt
    "optimizer": {
        "n_nests": 25,
        "iterations": 100,
        "pa": 0.25,
        "alpha": 0.01,
        "beta": 1.5,
        "hncsa_gamma": 1.0,
        "hncsa_eps": 1.0,
        "crossover_rate": 0.9,
    },
    "embed": {"dim": 100, "window": 5, "epochs": 5, "ngram": 2, "softmax": True},
    "fusion": {
        "kernel": "rbf",
        "gamma": None,
        "target_variance": 0.95,
        "depth_sub": 1.0,
        "depth_com": 2.0,
        "alpha": 1.0 / 3.0,
        "beta": 1.0 / 3.0,
        "gamma_mix": 1.0 / 3.0,
    },
    "split": [0.2, 0.2, 0.6],
    "out": "out",
    "seed": None,
}

_PATH_KEYS = ("taxonomy", "records", "edges", "verbs")


def load_config(path: Optional[str]) -> Dict[str, object]:
    """Overlay a JSON config file on the defaults and validate it.

    Unknown keys are config errors, as is any referenced path that does
    not exist.  Nested sections merge key by key.
    """
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        try:
            user = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{p}: invalid JSON ({exc})") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"{p}: config must be a JSON object")
        for key, value in user.items():
            if key not in cfg:
                raise ConfigError(f"{p}: unknown config key {key!r}")
            base = cfg[key]
            if isinstance(base, dict):
                if not isinstance(value, dict):
                    raise ConfigError(f"{p}: {key!r} must be an object")
                for sub, subval in value.items():
                    if sub not in base:
                        raise ConfigError(f"{p}: unknown config key {key}.{sub!r}")
                    base[sub] = subval
            else:
                cfg[key] = value
    for key in _PATH_KEYS:
        val = cfg[key]
        if val is not None and not Path(val).exists():
            raise ConfigError(f"config {key!r} path does not exist: {val}")
    cpath = cfg["corpus"].get("path")
    if cpath is not None and not Path(cpath).exists():
        raise ConfigError(f"config corpus.path does not exist: {cpath}")
    split = cfg["split"]
    if (
        not isinstance(split, (list, tuple))
        or len(split) != 3
        or abs(sum(float(s) for s in split) - 1.0) > 1e-9
    ):
        raise ConfigError(f"split must be three fractions summing to 1, got {split!r}")
    return cfg


def config_hash(cfg: Dict[str, object]) -> str:
    """Digest of the resolved parameters.

    The artifact root and the seed are excluded: the root only moves
    files around and the seed is recorded next to the hash.
    """
    trimmed = {k: v for k, v in cfg.items() if k not in ("out", "seed")}
    blob = json.dumps(trimmed, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _resolve_seed(args, cfg, stage: str, required: bool) -> int:
    seed = args.seed if args.seed is not None else cfg.get("seed")
    if seed is None:
        if required:
            raise ConfigError(
                f"seed is required for `{stage}`; pass --seed or set \"seed\" in the config"
            )
        return 0
    return int(seed)


def _out_root(args, cfg) -> Path:
    return Path(args.out if args.out is not None else cfg["out"])


def _stage_dir(args, cfg, stage: str) -> Path:
    d = _out_root(args, cfg) / STAGE_DIRS[stage]
    d.mkdir(parents=True, exist_ok=True)
    return d


# ---------------------------------------------------------------------------
# artifacts and manifests
# ---------------------------------------------------------------------------


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def _emit_text(path: Path, text: str) -> None:
    # leave bytes (and mtime) alone when nothing changed
    data = text.encode("utf-8")
    if path.exists() and path.read_bytes() == data:
        return
    path.write_bytes(data)


def _emit_json(path: Path, payload) -> None:
    _emit_text(path, json.dumps(payload, sort_keys=True, indent=1) + "\n")


def write_manifest(
    stage_dir: Path,
    stage: str,
    cfg_hash: str,
    seed: Optional[int],
    inputs: Dict[str, Path],
    outputs: Dict[str, Path],
    params: Dict[str, object],
) -> Path:
    manifest = {
        "stage": stage,
        "config_hash": cfg_hash,
        "seed": seed,
        "inputs": {name: _sha256_file(p) for name, p in sorted(inputs.items())},
        "outputs": {name: _sha256_file(p) for name, p in sorted(outputs.items())},
        "params": params,
    }
    path = stage_dir / "manifest.json"
    _emit_json(path, manifest)
    return path


def _require(path: Path, what: str, command: str) -> Path:
    if not path.exists():
        raise DataError(f"{what} not found at {path}; run `fgfusion {command}` first")
    return path


# ---------------------------------------------------------------------------
# shared loaders
# ---------------------------------------------------------------------------


def _load_pool(cfg):
    from .keywords import default_taxonomy_path, expand_keywords, load_taxonomy

    tax_path = Path(cfg["taxonomy"]) if cfg["taxonomy"] else default_taxonomy_path()
    return tax_path, expand_keywords(load_taxonomy(tax_path))


def _load_records(cfg):
    from .graphset import ingest_records

    rec_path = Path(cfg["records"]) if cfg["records"] else _data("records_demo.csv")
    result = ingest_records(rec_path)
    return rec_path, result.records


def _record_key(record) -> str:
    from .graphset import format_id

    return format_id(record.id)


def _table_rows(table, keys: Sequence[str], path: Path):
    import numpy as np

    rows = []
    for key in keys:
        if key not in table.vectors:
            raise DataError(f"{path}: no vector for record {key!r}")
        rows.append(np.asarray(table.vectors[key], dtype=float))
    return np.vstack(rows)


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


def cmd_fetch(args, cfg) -> int:
    from .corpus import dedup, fetch_arxiv, load_offline, save_offline

    stage_dir = _stage_dir(args, cfg, "fetch")
    seed = _resolve_seed(args, cfg, "fetch", required=False)
    source = args.source or cfg["corpus"]["source"]
    inputs: Dict[str, Path] = {}
    if source == "offline":
        src = Path(cfg["corpus"]["path"]) if cfg["corpus"]["path"] else _data("corpus_200.jsonl")
        if not src.exists():
            raise DataError(f"offline corpus not found: {src}")
        docs = dedup(load_offline(src))
        inputs[src.name] = src
        params = {"source": "offline", "path": str(src)}
    elif source == "live":
        query = args.query or cfg["corpus"]["query"]
        max_results = args.max_results or cfg["corpus"]["max_results"]
        docs = dedup(fetch_arxiv(query, max_results))
        params = {"source": "live", "query": query, "max_results": max_results}
    else:
        raise ConfigError(f"unknown corpus source {source!r}; expected offline or live")
    out_path = stage_dir / "corpus.jsonl"
    save_offline(docs, out_path)
    write_manifest(
        stage_dir, "fetch", config_hash(cfg), seed, inputs, {"corpus.jsonl": out_path}, params
    )
    print(f"fetch: {len(docs)} documents -> {out_path}")
    return 0


def cmd_optimize(args, cfg) -> int:
    from .corpus import load_offline, match_counts
    from .optimizer import RunConfig, run

    stage_dir = _stage_dir(args, cfg, "optimize")
    seed = _resolve_seed(args, cfg, "optimize", required=True)
    corpus_path = _require(
        _out_root(args, cfg) / STAGE_DIRS["fetch"] / "corpus.jsonl", "corpus snapshot", "fetch"
    )
    tax_path, pool = _load_pool(cfg)
    docs = load_offline(corpus_path)
    profile = match_counts(docs, pool)
    rc = RunConfig(algo=args.algo, seed=seed, **cfg["optimizer"])
    history = run(rc, profile)
    out_path = stage_dir / f"run_{args.algo}.json"
    _emit_text(out_path, history.to_json() + "\n")
    write_manifest(
        stage_dir,
        "optimize",
        config_hash(cfg),
        seed,
        {"corpus.jsonl": corpus_path, tax_path.name: tax_path},
        {out_path.name: out_path},
        rc.to_dict(),
    )
    front = history.final_front
    print(f"optimize: {args.algo} seed={seed} front={len(front)} -> {out_path}")
    return 0


def _fit_summary(f1s, f2s):
    from .frontier import fit_exp_decay, normalize_objectives, pareto_front

    front = pareto_front(normalize_objectives(f1s, f2s))
    if len(front) < 3:
        return None
    fit = fit_exp_decay([p[0] for p in front], [p[1] for p in front])
    return {
        "a1": fit.a1,
        "t1": fit.t1,
        "y0": fit.y0,
        "converged": fit.converged,
        "n_iter": fit.n_iter,
    }


def cmd_evaluate(args, cfg) -> int:
    import numpy as np

    from .corpus import load_offline, match_counts
    from .frontier import (
        fitted_front_hypervolume,
        hypervolume_paper,
        normalize_objectives,
        retrieval_metrics,
    )
    from .optimizer import RunHistory

    stage_dir = _stage_dir(args, cfg, "evaluate")
    seed = _resolve_seed(args, cfg, "evaluate", required=False)
    run_dir = _out_root(args, cfg) / STAGE_DIRS["optimize"]
    run_paths = sorted(run_dir.glob("run_*.json"))
    if not run_paths:
        raise DataError(
            f"no run histories in {run_dir}; run `fgfusion optimize` first"
        )
    corpus_path = _require(
        _out_root(args, cfg) / STAGE_DIRS["fetch"] / "corpus.jsonl", "corpus snapshot", "fetch"
    )
    tax_path, pool = _load_pool(cfg)
    docs = load_offline(corpus_path)
    profile = match_counts(docs, pool)
    index = {tok: i for i, tok in enumerate(profile.pool)}
    relevant = [d.id for d in docs if d.relevant]

    algorithms: Dict[str, object] = {}
    inputs: Dict[str, Path] = {"corpus.jsonl": corpus_path, tax_path.name: tax_path}
    for path in run_paths:
        hist = RunHistory.from_json(path.read_text(encoding="utf-8"))
        inputs[path.name] = path
        f1s = [e["f1"] for e in hist.final_front]
        f2s = [e["f2"] for e in hist.final_front]
        gbest = hist.iterations[-1]["gbest"]
        combo_rows = [index[tok] for tok in gbest["combo"] if tok in index]
        hit_mask = (profile.counts[combo_rows, :] > 0).any(axis=0)
        retrieved = [profile.doc_ids[j] for j in np.flatnonzero(hit_mask)]
        if relevant and retrieved:
            metrics = retrieval_metrics(retrieved, relevant, len(retrieved))
        else:
            metrics = None  # corpus carries no relevance flags, or nothing matched
        algorithms[hist.algo] = {
            "seed": hist.seed,
            "front_points": len(hist.final_front),
            "hypervolume_fitted": fitted_front_hypervolume(f1s, f2s),
            "hypervolume_box": hypervolume_paper(normalize_objectives(f1s, f2s)),
            "fit": _fit_summary(f1s, f2s),
            "gbest": {
                "combo": list(gbest["combo"]),
                "f1": gbest["f1"],
                "f2": gbest["f2"],
            },
            "retrieval": metrics,
        }
    payload = {"config_hash": config_hash(cfg), "seed": seed, "algorithms": algorithms}
    out_path = stage_dir / "metrics.json"
    _emit_json(out_path, payload)
    write_manifest(
        stage_dir,
        "evaluate",
        config_hash(cfg),
        seed,
        inputs,
        {"metrics.json": out_path},
        {"runs": [p.name for p in run_paths]},
    )
    for algo in sorted(algorithms):
        entry = algorithms[algo]
        print(
            f"evaluate: {algo} hv={entry['hypervolume_fitted']:.4f} "
            f"front={entry['front_points']}"
        )
    return 0


def _subcom_vector(record, vectors, stats, n, softmax):
    from .embeddings import aggregate_subcom, ngrams, tokenize

    toks = tokenize(f"{record.subsystem} {record.component}")
    weights = {t: stats.weight(t) for t in toks}
    return aggregate_subcom(ngrams(toks, n), vectors, weights, softmax=softmax)


def cmd_embed(args, cfg) -> int:
    import numpy as np

    from .embeddings import (
        EmbeddingTable,
        TfidfStats,
        sentence_hash_embed,
        tokenize,
        train_sgns,
        write_embeddings,
    )

    stage_dir = _stage_dir(args, cfg, "embed")
    seed = _resolve_seed(args, cfg, "embed", required=False)
    rec_path, records = _load_records(cfg)
    keys = [_record_key(r) for r in records]
    ecfg = cfg["embed"]
    softmax = bool(ecfg["softmax"]) and not args.no_softmax
    sentences = [tokenize(f"{r.subsystem} {r.component}") for r in records]
    stats = TfidfStats.from_documents(sentences)

    if args.sweep_dims:
        try:
            dims = [int(d) for d in args.sweep_dims.split(",") if d.strip()]
        except ValueError as exc:
            raise ConfigError(f"--sweep-dims expects integers, got {args.sweep_dims!r}") from exc
        if not dims:
            raise ConfigError("--sweep-dims is empty")
        sweep = []
        for dim in dims:
            table = train_sgns(
                sentences, dim=dim, window=ecfg["window"], epochs=ecfg["epochs"], seed=seed
            )
            # the sweep inspects the raw aggregated vectors: the softmax
            # squashes every record onto the simplex and all cosines hit 1
            mat = np.vstack(
                [_subcom_vector(r, table.vectors, stats, ecfg["ngram"], False) for r in records]
            )
            norms = np.linalg.norm(mat, axis=1)
            norms[norms == 0.0] = 1.0
            unit = mat / norms[:, None]
            sims = unit @ unit.T
            iu = np.triu_indices(len(records), k=1)
            pair = sims[iu]
            sweep.append(
                {
                    "dim": dim,
                    "similarity_mean": float(pair.mean()),
                    "similarity_std": float(pair.std()),
                    "n_pairs": int(pair.size),
                }
            )
        out_path = stage_dir / "sweep.json"
        _emit_json(
            out_path, {"config_hash": config_hash(cfg), "seed": seed, "sweep": sweep}
        )
        write_manifest(
            stage_dir,
            "embed",
            config_hash(cfg),
            seed,
            {rec_path.name: rec_path},
            {"sweep.json": out_path},
            {"sweep_dims": dims, "softmax": False},
        )
        for row in sweep:
            print(
                f"embed: dim={row['dim']} similarity std={row['similarity_std']:.4f} "
                f"mean={row['similarity_mean']:.4f}"
            )
        return 0

    dim = int(ecfg["dim"])
    sgns = train_sgns(
        sentences, dim=dim, window=ecfg["window"], epochs=ecfg["epochs"], seed=seed
    )
    tables = {tag: EmbeddingTable(dim, tag) for tag in ("sub", "com", "subcom", "mode", "reason")}
    tables["decision"] = EmbeddingTable(SENTENCE_DIM, "decision")
    tables["effect"] = EmbeddingTable(SENTENCE_DIM, "effect")
    for record, key in zip(records, keys):
        tables["sub"].vectors[key] = sentence_hash_embed(record.subsystem, dim)
        tables["com"].vectors[key] = sentence_hash_embed(record.component, dim)
        tables["subcom"].vectors[key] = _subcom_vector(
            record, sgns.vectors, stats, ecfg["ngram"], softmax
        )
        tables["mode"].vectors[key] = sentence_hash_embed(record.failure_mode, dim)
        tables["reason"].vectors[key] = sentence_hash_embed(record.failure_reason, dim)
        tables["decision"].vectors[key] = sentence_hash_embed(
            record.emergency_measure, SENTENCE_DIM
        )
        tables["effect"].vectors[key] = sentence_hash_embed(record.failure_effect, SENTENCE_DIM)
    outputs: Dict[str, Path] = {}
    for tag in FIELD_TAGS:
        path = stage_dir / f"{tag}.vec"
        write_embeddings(path, tables[tag])
        outputs[path.name] = path
    write_manifest(
        stage_dir,
        "embed",
        config_hash(cfg),
        seed,
        {rec_path.name: rec_path},
        outputs,
        {"dim": dim, "sentence_dim": SENTENCE_DIM, "ngram": ecfg["ngram"], "softmax": softmax},
    )
    print(f"embed: {len(records)} records, {len(FIELD_TAGS)} tables -> {stage_dir}")
    return 0


def cmd_fuse(args, cfg) -> int:
    import numpy as np

    from .embeddings import read_embeddings
    from .fusion import (
        FusionWeights,
        fuse,
        kpca_fit,
        kpca_project,
        load_verb_lexicon,
        standardize,
        weight_attention,
        weight_hierarchy,
        weight_verbs,
    )

    stage_dir = _stage_dir(args, cfg, "fuse")
    seed = _resolve_seed(args, cfg, "fuse", required=True)
    embed_dir = _out_root(args, cfg) / STAGE_DIRS["embed"]
    rec_path, records = _load_records(cfg)
    keys = [_record_key(r) for r in records]

    rows: Dict[str, object] = {}
    inputs: Dict[str, Path] = {rec_path.name: rec_path}
    for field in ("subcom", "mode", "reason", "decision", "effect"):
        path = embed_dir / f"{field}.vec"
        if not path.exists():
            raise DataError(
                f"embedding table for field {field!r} not found at {path}; "
                "run `fgfusion embed` first"
            )
        rows[field] = _table_rows(read_embeddings(path), keys, path)
        inputs[path.name] = path

    fcfg = cfg["fusion"]
    union = np.vstack([rows["mode"], rows["reason"]])
    model = kpca_fit(
        union,
        kernel=fcfg["kernel"],
        gamma=fcfg["gamma"],
        target_variance=fcfg["target_variance"],
    )
    proj_mode = kpca_project(model, rows["mode"])
    proj_reason = kpca_project(model, rows["reason"])

    w1 = weight_hierarchy(fcfg["depth_sub"], fcfg["depth_com"])
    w2 = weight_attention(proj_mode, proj_reason, rowwise=args.rowwise_attention)
    verbs_path = Path(cfg["verbs"]) if cfg["verbs"] else _data("verbs.txt")
    lexicon = load_verb_lexicon(verbs_path)
    inputs[verbs_path.name] = verbs_path
    w3 = weight_verbs(
        [r.emergency_measure for r in records], rows["decision"], rows["effect"], lexicon
    )

    blocks = [
        {
            "subcom": rows["subcom"][i],
            "mode": proj_mode[i],
            "reason": proj_reason[i],
            "decision": rows["decision"][i],
            "effect": rows["effect"][i],
        }
        for i in range(len(records))
    ]
    fused = fuse(blocks, FusionWeights(w1=w1, w2=w2, w3=w3))
    matrix = fused.matrix if args.no_standardize else standardize(fused.matrix)
    widths = {
        "subcom": rows["subcom"].shape[1],
        "mode": fused.k,
        "reason": fused.k,
        "decision": rows["decision"].shape[1],
        "effect": rows["effect"].shape[1],
    }
    note = (
        "d_total = subcom + 2k + decision + effect = "
        f"{widths['subcom']} + 2*{fused.k} + {widths['decision']} + {widths['effect']} = "
        f"{fused.d_total}; the published reference table lists 1210 at k=121, "
        "while this layout gives 100 + 2*121 + 768 = 1110 there."
    )
    matrix_path = stage_dir / "fused.npy"
    np.save(matrix_path, matrix)  # .npy carries no timestamps; bytes are stable
    report = {
        "config_hash": config_hash(cfg),
        "seed": seed,
        "ids": keys,
        "n_records": len(records),
        "k": fused.k,
        "d_total": fused.d_total,
        "widths": widths,
        "kernel": fcfg["kernel"],
        "target_variance": fcfg["target_variance"],
        "variance_ratio": model.variance_ratio,
        "standardized": not args.no_standardize,
        "w1": w1,
        "w2": [float(v) for v in w2],
        "w3": [float(v) for v in w3],
        "width_note": note,
    }
    report_path = stage_dir / "fuse_report.json"
    _emit_json(report_path, report)
    write_manifest(
        stage_dir,
        "fuse",
        config_hash(cfg),
        seed,
        inputs,
        {"fused.npy": matrix_path, "fuse_report.json": report_path},
        {
            "kernel": fcfg["kernel"],
            "target_variance": fcfg["target_variance"],
            "depth_sub": fcfg["depth_sub"],
            "depth_com": fcfg["depth_com"],
            "rowwise_attention": bool(args.rowwise_attention),
            "standardized": not args.no_standardize,
        },
    )
    print(f"fuse: k={fused.k} d_total={fused.d_total} w1={w1:.5f} -> {matrix_path}")
    return 0


def cmd_build_graph(args, cfg) -> int:
    import numpy as np

    from .graphset import assemble, export, ingest_edges

    stage_dir = _stage_dir(args, cfg, "build-graph")
    seed = _resolve_seed(args, cfg, "build-graph", required=True)
    fuse_dir = _out_root(args, cfg) / STAGE_DIRS["fuse"]
    matrix_path = _require(fuse_dir / "fused.npy", "fused feature matrix", "fuse")
    report_path = _require(fuse_dir / "fuse_report.json", "fuse report", "fuse")
    rec_path, records = _load_records(cfg)
    keys = [_record_key(r) for r in records]
    fuse_report = json.loads(report_path.read_text(encoding="utf-8"))
    if fuse_report["ids"] != keys:
        raise DataError(
            "fused matrix rows do not cover the current records; re-run `fgfusion fuse`"
        )
    matrix = np.load(matrix_path)
    edges_path = Path(cfg["edges"]) if cfg["edges"] else _data("edges_demo.csv")
    if not edges_path.exists():
        raise DataError(f"edge list not found: {edges_path}")
    edges = ingest_edges(edges_path, undirected=args.undirected)
    dataset = assemble(records, matrix, edges, split=tuple(cfg["split"]), seed=seed)
    written = export(dataset, stage_dir)
    outputs = {Path(p).name: Path(p) for p in written.values()}
    write_manifest(
        stage_dir,
        "build-graph",
        config_hash(cfg),
        seed,
        {
            rec_path.name: rec_path,
            edges_path.name: edges_path,
            "fused.npy": matrix_path,
            "fuse_report.json": report_path,
        },
        outputs,
        {"undirected": bool(args.undirected), "split": list(cfg["split"])},
    )
    print(
        f"build-graph: {len(dataset.nodes)} nodes, {len(dataset.edges)} edges -> {stage_dir}"
    )
    return 0


def cmd_validate(args, cfg) -> int:
    import numpy as np

    from .embeddings import read_embeddings
    from .fusion import frequency_class_weights, fusion_class_weights, weighted_ce_loss
    from .graphset import load_dataset
    from .validate import cosine_block_stats, kmeans, silhouette

    stage_dir = _stage_dir(args, cfg, "validate")
    seed = _resolve_seed(args, cfg, "validate", required=False)
    graph_dir = _out_root(args, cfg) / STAGE_DIRS["build-graph"]
    _require(graph_dir / "meta.json", "exported dataset", "build-graph")
    dataset = load_dataset(graph_dir)
    embed_dir = _out_root(args, cfg) / STAGE_DIRS["embed"]
    fuse_dir = _out_root(args, cfg) / STAGE_DIRS["fuse"]
    report_path = _require(fuse_dir / "fuse_report.json", "fuse report", "fuse")
    fuse_report = json.loads(report_path.read_text(encoding="utf-8"))
    keys: List[str] = fuse_report["ids"]

    inputs: Dict[str, Path] = {
        "meta.json": graph_dir / "meta.json",
        "nodes.csv": graph_dir / "nodes.csv",
        "edges.csv": graph_dir / "edges.csv",
        "fuse_report.json": report_path,
    }
    blocks: Dict[str, object] = {}
    for tag in FIELD_TAGS:
        path = embed_dir / f"{tag}.vec"
        if not path.exists():
            raise DataError(
                f"embedding table for field {tag!r} not found at {path}; "
                "run `fgfusion embed` first"
            )
        blocks[tag] = _table_rows(read_embeddings(path), keys, path)
        inputs[path.name] = path
    similarity = cosine_block_stats(blocks)

    # per-record designated-pair cosines, one row per id
    def _unit(mat):
        norms = np.linalg.norm(mat, axis=1)
        norms[norms == 0.0] = 1.0
        return mat / norms[:, None]

    pair_cols = (("sub", "com"), ("mode", "reason"), ("effect", "decision"))
    units = {tag: _unit(np.asarray(blocks[tag], dtype=float)) for tag in FIELD_TAGS}
    lines = ["id," + ",".join(f"{a}_{b}" for a, b in pair_cols)]
    for i, key in enumerate(keys):
        vals = [float(np.dot(units[a][i], units[b][i])) for a, b in pair_cols]
        lines.append(key + "," + ",".join(repr(v) for v in vals))
    distances_path = stage_dir / "distances.csv"
    _emit_text(distances_path, "\n".join(lines) + "\n")

    node_ids = sorted(dataset.nodes)
    features = np.vstack([dataset.nodes[i][0] for i in node_ids])
    labels = [dataset.nodes[i][1] for i in node_ids]
    classes = sorted(set(labels))
    class_index = {c: i for i, c in enumerate(classes)}
    y = np.array([class_index[l] for l in labels])
    k = min(len(classes), len(node_ids) - 1)
    km = kmeans(features, k=k, seed=seed)
    sil_clusters = float(silhouette(features, km.labels))
    sil_system = float(silhouette(features, y))

    freq = np.bincount(y, minlength=len(classes)).astype(float) / len(y)
    probs = np.tile(freq, (len(y), 1))
    if args.class_weights == "fusion":
        y_rec = np.array([class_index[dataset.nodes[key][1]] for key in keys])
        cw = fusion_class_weights(
            y_rec,
            len(classes),
            fuse_report["w1"],
            np.asarray(fuse_report["w2"], dtype=float),
            np.asarray(fuse_report["w3"], dtype=float),
            alpha=cfg["fusion"]["alpha"],
            beta=cfg["fusion"]["beta"],
            gamma=cfg["fusion"]["gamma_mix"],
        )
    else:
        cw = frequency_class_weights(y, len(classes))
    loss = weighted_ce_loss(probs, y, class_weights=cw)

    split_counts: Dict[str, int] = {}
    for split in dataset.splits.values():
        split_counts[split] = split_counts.get(split, 0) + 1
    payload = {
        "config_hash": config_hash(cfg),
        "seed": seed,
        "n_nodes": len(node_ids),
        "n_edges": len(dataset.edges),
        "n_classes": len(classes),
        "split_counts": split_counts,
        "similarity": json.loads(similarity.to_json()),
        "kmeans": {
            "k": k,
            "inertia": km.inertia,
            "n_iter": km.n_iter,
            "silhouette": sil_clusters,
        },
        "system_silhouette": sil_system,
        "ce_loss": {"scheme": args.class_weights, "value": float(loss)},
    }
    out_path = stage_dir / "validation.json"
    _emit_json(out_path, payload)
    write_manifest(
        stage_dir,
        "validate",
        config_hash(cfg),
        seed,
        inputs,
        {"validation.json": out_path, "distances.csv": distances_path},
        {"class_weights": args.class_weights, "k": k},
    )
    print(
        f"validate: silhouette={sil_clusters:.3f} (system labels {sil_system:.3f}) "
        f"loss={loss:.4f} -> {out_path}"
    )
    return 0


def _read_json(path: Path):
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))


def cmd_report(args, cfg) -> int:
    root = _out_root(args, cfg)
    stage_dir = _stage_dir(args, cfg, "report")
    manifests = {}
    for stage, sub in STAGE_DIRS.items():
        if stage == "report":
            continue
        m = _read_json(root / sub / "manifest.json")
        if m is not None:
            manifests[stage] = m
    if not manifests:
        raise DataError(
            f"no stage manifests under {root}; run the pipeline stages first "
            "(`fgfusion fetch` onward)"
        )
    metrics = _read_json(root / STAGE_DIRS["evaluate"] / "metrics.json")
    fuse_report = _read_json(root / STAGE_DIRS["fuse"] / "fuse_report.json")
    validation = _read_json(root / STAGE_DIRS["validate"] / "validation.json")
    graph_meta = _read_json(root / STAGE_DIRS["build-graph"] / "meta.json")

    measured: Dict[str, object] = {}
    if metrics:
        measured["hypervolume"] = {
            algo: entry["hypervolume_fitted"] for algo, entry in metrics["algorithms"].items()
        }
        retrievals = {
            algo: entry["retrieval"]
            for algo, entry in metrics["algorithms"].items()
            if entry.get("retrieval")
        }
        if retrievals:
            measured["retrieval"] = retrievals
    if fuse_report:
        measured["fused_width"] = {
            "k": fuse_report["k"],
            "d_total": fuse_report["d_total"],
            "note": fuse_report["width_note"],
        }
    if validation:
        measured["block_means"] = validation["similarity"]["block_means"]
        measured["silhouette"] = validation["kmeans"]["silhouette"]
        measured["system_silhouette"] = validation["system_silhouette"]
        measured["dataset"] = {
            "nodes": validation["n_nodes"],
            "edges": validation["n_edges"],
            "classes": validation["n_classes"],
        }
    elif graph_meta:
        measured["dataset"] = {
            k: graph_meta[k] for k in ("nodes", "edges", "classes") if k in graph_meta
        }

    payload = {
        "config_hash": config_hash(cfg),
        "stages": manifests,
        "measured": measured,
        "published_reference": PUBLISHED_REFERENCE,
    }
    out_path = stage_dir / "report.json"
    _emit_json(out_path, payload)
    write_manifest(
        stage_dir,
        "report",
        config_hash(cfg),
        _resolve_seed(args, cfg, "report", required=False),
        {},
        {"report.json": out_path},
        {"stages": sorted(manifests)},
    )

    print("stage summary")
    for stage in STAGES:
        if stage == "report":
            continue
        mark = "done" if stage in manifests else "not run"
        print(f"  {stage:<12} {mark}")
    print("measured vs published reference")
    hv = measured.get("hypervolume", {})
    for algo in ("hncsa", "csa", "nsga2"):
        ref = PUBLISHED_REFERENCE["hypervolume"][algo]
        got = f"{hv[algo]:.4f}" if algo in hv else "-"
        print(f"  hypervolume {algo:<6} {got:>8}   published {ref}")
    if "retrieval" in measured:
        ref = PUBLISHED_REFERENCE["retrieval"]
        for algo, m in sorted(measured["retrieval"].items()):
            print(
                f"  retrieval {algo:<8} R={m['recall']:.2f} P={m['precision']:.2f} "
                f"F1={m['f1']:.2f}   published R={ref['recall']} P={ref['precision']} "
                f"F1={ref['f1']}"
            )
    if "block_means" in measured:
        ref = PUBLISHED_REFERENCE["block_means"]
        for pair, val in sorted(measured["block_means"].items()):
            print(f"  cosine {pair:<16} {val:.3f}   published {ref.get(pair, '-')}")
    if "silhouette" in measured:
        print(
            f"  silhouette          {measured['silhouette']:.3f}   published "
            f"{PUBLISHED_REFERENCE['silhouette']}"
        )
    if "dataset" in measured:
        d = measured["dataset"]
        ref = PUBLISHED_REFERENCE["dataset"]
        print(
            f"  dataset             {d.get('nodes', '-')}/{d.get('edges', '-')}/"
            f"{d.get('classes', '-')}   published {ref['nodes']}/{ref['edges']}/"
            f"{ref['classes']} (nodes/edges/classes)"
        )
    if "fused_width" in measured:
        fw = measured["fused_width"]
        print(f"  fused width         k={fw['k']} d_total={fw['d_total']}")
        print(f"    note: {fw['note']}")
    print(f"report written to {out_path}")
    return 0


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="pipeline config JSON")
    common.add_argument(
        "--seed", type=int, default=None, help="master seed, applied per stage"
    )
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads for accelerated kernels (default: all cores)",
    )
    common.add_argument(
        "--out", metavar="DIR", default=None, help="artifact root (default: ./out)"
    )

    parser = argparse.ArgumentParser(
        prog="fgfusion",
        description="keyword-combination retrieval tuning and fused-feature graph dataset pipeline",
        epilog=_FLAG_INDEX,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser(
        "fetch", parents=[common], help="snapshot the document corpus (offline copy or live query)"
    )
    p.add_argument("--source", choices=("offline", "live"), default=None)
    p.add_argument("--query", default=None, help="live search query")
    p.add_argument("--max-results", type=int, default=None, help="live result cap")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("optimize", parents=[common], help="run one keyword-combination search")
    p.add_argument("--algo", choices=("hncsa", "csa", "nsga2"), default="hncsa")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser(
        "evaluate", parents=[common], help="score run histories: hypervolume, front fit, retrieval"
    )
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "embed", parents=[common], help="build per-field embedding tables with built-in backends"
    )
    p.add_argument(
        "--no-softmax",
        action="store_true",
        help="aggregate n-gram vectors by plain weighted mean instead of softmax",
    )
    p.add_argument(
        "--sweep-dims",
        metavar="D1,D2,...",
        default=None,
        help="train at each dimension and report pairwise similarity spread instead of writing tables",
    )
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser(
        "fuse", parents=[common], help="reduce, weight, and concatenate field blocks"
    )
    p.add_argument(
        "--rowwise-attention",
        action="store_true",
        help="per-row softmax in the attention weight (default: whole-matrix)",
    )
    p.add_argument(
        "--no-standardize", action="store_true", help="skip per-column z-scoring"
    )
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser(
        "build-graph", parents=[common], help="assemble and export the graph dataset"
    )
    p.add_argument(
        "--undirected", action="store_true", help="mirror every edge in both directions"
    )
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser(
        "validate", parents=[common], help="similarity, clustering, and loss checks"
    )
    p.add_argument(
        "--class-weights",
        choices=("fusion", "frequency"),
        default="fusion",
        help="class-weight scheme for the reference loss",
    )
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser(
        "report", parents=[common], help="collate stage manifests into one summary"
    )
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return 2
        # must land before the kernels import numba
        os.environ["NUMBA_NUM_THREADS"] = str(args.threads)
        os.environ["OMP_NUM_THREADS"] = str(args.threads)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FgfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
