"""Export job: records file in, one embedding file per field out.

Phrase fields (failure_mode, failure_reason) go through the contextual
phrase encoder and keep the encoder's native width. Sentence fields
(failure_effect, emergency_measure) go through the mean-pooling
sentence encoder and are always 384 wide. Texts are encoded in batches
in file order; output files are written one field at a time, rows keyed
by record id. Given the same records and the same model weights the
export is bit-identical, so reruns can be diffed.

Empty field texts are not errors: they become zero-vector rows and the
record ids are flagged per field in the sidecar ``export_report.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .encoders import SENTENCE_DIM, HashNgramEncoder, PhraseEncoder, SentenceEncoder
from .errors import InputError, SetupError
from .records import TEXT_FIELDS, read_records
from .vecio import write_vec

# record field -> tag used in the output file name and header
FIELD_TAGS = {
    "failure_mode": "mode",
    "failure_reason": "reason",
    "failure_effect": "effect",
    "emergency_measure": "decision",
}

PHRASE_FIELDS = ("failure_mode", "failure_reason")
SENTENCE_FIELDS = ("failure_effect", "emergency_measure")

# documented defaults; both are ordinary hub identifiers and can be
# replaced by any local directory holding compatible weights
DEFAULT_PHRASE_MODEL = "bert-base-uncased"
DEFAULT_SENTENCE_MODEL = "sentence-transformers/all-MiniLM-L6-v2"

REPORT_NAME = "export_report.json"


@dataclass
class ExportJob:
    """Everything one export run needs.

    ``fields`` uses record field names, not tags. ``backend`` is either
    ``"transformer"`` (pretrained encoders named by ``phrase_model`` and
    ``sentence_model``) or ``"hash"`` (the offline n-gram encoder).
    """

    records: str
    out_dir: str
    fields: Tuple[str, ...] = TEXT_FIELDS
    backend: str = "transformer"
    phrase_model: str = DEFAULT_PHRASE_MODEL
    sentence_model: str = DEFAULT_SENTENCE_MODEL
    mean_pool_phrases: bool = False
    batch_size: int = 32


def _selected_fields(requested: Sequence[str]) -> List[str]:
    bad = [name for name in requested if name not in TEXT_FIELDS]
    if bad:
        raise InputError(
            f"unknown field(s) {bad}, valid fields are {list(TEXT_FIELDS)}"
        )
    if not requested:
        raise InputError("no fields selected")
    # canonical order, duplicates collapsed
    wanted = set(requested)
    return [name for name in TEXT_FIELDS if name in wanted]


def _build_encoders(job: ExportJob, fields: Sequence[str]):
    need_phrase = any(name in PHRASE_FIELDS for name in fields)
    need_sentence = any(name in SENTENCE_FIELDS for name in fields)
    phrase = sentence = None
    if job.backend == "hash":
        if need_phrase:
            phrase = HashNgramEncoder(dim=SENTENCE_DIM)
        if need_sentence:
            sentence = HashNgramEncoder(dim=SENTENCE_DIM)
        used = {"phrase": "hash", "sentence": "hash"}
    elif job.backend == "transformer":
        if need_phrase:
            phrase = PhraseEncoder(
                job.phrase_model,
                batch_size=job.batch_size,
                mean_pool=job.mean_pool_phrases,
            )
        if need_sentence:
            sentence = SentenceEncoder(job.sentence_model, batch_size=job.batch_size)
        used = {"phrase": job.phrase_model, "sentence": job.sentence_model}
    else:
        raise SetupError(
            f"unknown backend {job.backend!r}, expected 'transformer' or 'hash'"
        )
    return phrase, sentence, used


def run_export(job: ExportJob) -> Dict:
    """Run one export job and return the sidecar report dict.

    Writes ``<tag>.vec`` per selected field plus ``export_report.json``
    into ``job.out_dir``.
    """
    fields = _selected_fields(tuple(job.fields))
    records = read_records(job.records)
    phrase_enc, sentence_enc, used_models = _build_encoders(job, fields)

    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    ids = [rec["id"] for rec in records]
    report_fields: Dict[str, Dict] = {}
    zero_rows: Dict[str, List[str]] = {}
    for name in fields:
        tag = FIELD_TAGS[name]
        encoder = phrase_enc if name in PHRASE_FIELDS else sentence_enc
        texts = [rec[name] for rec in records]
        filled = [i for i, text in enumerate(texts) if text.strip()]
        filled_set = set(filled)
        vectors = np.zeros((len(texts), encoder.dim))
        if filled:
            vectors[filled] = encoder.encode_batch([texts[i] for i in filled])
        table = {ids[i]: vectors[i] for i in range(len(ids))}
        write_vec(out_dir / f"{tag}.vec", encoder.dim, tag, table)
        zero_rows[tag] = sorted(
            ids[i] for i in range(len(ids)) if i not in filled_set
        )
        report_fields[tag] = {
            "source": name,
            "file": f"{tag}.vec",
            "dim": encoder.dim,
            "rows": len(ids),
        }

    report = {
        "records": len(records),
        "backend": job.backend,
        "models": used_models,
        "fields": report_fields,
        "zero_rows": zero_rows,
    }
    with open(out_dir / REPORT_NAME, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report
