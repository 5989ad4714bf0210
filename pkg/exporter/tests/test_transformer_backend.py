"""Contextual backend behaviour against a locally built miniature model.

No weights are vendored and nothing is downloaded: the fixture
constructs a small randomly initialised encoder with the sentence width
(384), saves it to a temp directory, and the tests load it by path the
same way a real identifier would resolve. Random weights carry no
semantics, so these tests pin shapes, pooling behaviour, determinism
and error handling, not relatedness.
"""

import warnings

import numpy as np
import pytest

torch = pytest.importorskip("torch")
transformers = pytest.importorskip("transformers")

from fgfusion.embeddings import read_embeddings

from fgf_exporter import (
    SENTENCE_DIM,
    ExportJob,
    PhraseEncoder,
    SentenceEncoder,
    SetupError,
    run_export,
)

VOCAB_WORDS = (
    "signal dropout transducer crystal aging obstacle returns fade below the "
    "detection threshold near bow sector inspect array replace aged elements "
    "channel saturation gain stage drift humid conditions phantom echoes crowd "
    "track list mask real contacts adjust receiver restart card pointing loss "
    "pedestal servo wear shore link drops during turns and telemetry gaps "
    "appear service recalibrate antenna"
).split()


def _build_model(out_dir, hidden_size):
    from transformers import BertConfig, BertModel, BertTokenizerFast

    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + sorted(set(VOCAB_WORDS))
    vocab_file = out_dir / "vocab.txt"
    vocab_file.write_text("\n".join(vocab) + "\n", encoding="utf-8")
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=hidden_size,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=2 * hidden_size,
        max_position_embeddings=64,
    )
    torch.manual_seed(1234)
    model = BertModel(config)
    tokenizer = BertTokenizerFast(vocab_file=str(vocab_file), do_lower_case=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return str(out_dir)


@pytest.fixture(scope="session")
def tiny_model(tmp_path_factory):
    return _build_model(tmp_path_factory.mktemp("enc384"), SENTENCE_DIM)


@pytest.fixture(scope="session")
def narrow_model(tmp_path_factory):
    return _build_model(tmp_path_factory.mktemp("enc64"), 64)


TEXTS = [
    "signal dropout",
    "phantom echoes crowd the obstacle track list",
    "service the pedestal servo and recalibrate antenna pointing",
]


def test_phrase_encoder_shape_and_dtype(tiny_model):
    enc = PhraseEncoder(tiny_model)
    out = enc.encode_batch(TEXTS)
    assert out.shape == (3, SENTENCE_DIM)
    assert out.dtype == np.float64
    assert np.all(np.isfinite(out))


def test_sentence_encoder_shape(tiny_model):
    out = SentenceEncoder(tiny_model).encode_batch(TEXTS)
    assert out.shape == (3, SENTENCE_DIM)


def test_fresh_loads_are_deterministic(tiny_model):
    a = PhraseEncoder(tiny_model).encode_batch(TEXTS)
    b = PhraseEncoder(tiny_model).encode_batch(TEXTS)
    assert np.array_equal(a, b)
    c = SentenceEncoder(tiny_model).encode_batch(TEXTS)
    d = SentenceEncoder(tiny_model).encode_batch(TEXTS)
    assert np.array_equal(c, d)


def test_mean_pool_flag_changes_phrase_pooling(tiny_model):
    cls_pooled = PhraseEncoder(tiny_model).encode_batch(TEXTS)
    mean_pooled = PhraseEncoder(tiny_model, mean_pool=True).encode_batch(TEXTS)
    assert float(np.abs(cls_pooled - mean_pooled).max()) > 1e-6


def test_batch_size_does_not_change_results(tiny_model):
    # padded positions are masked out of both pooling modes
    whole = SentenceEncoder(tiny_model, batch_size=32).encode_batch(TEXTS)
    single = SentenceEncoder(tiny_model, batch_size=1).encode_batch(TEXTS)
    assert np.allclose(whole, single, atol=1e-5)


def test_sentence_encoder_rejects_wrong_width(narrow_model):
    with pytest.raises(SetupError, match="384"):
        SentenceEncoder(narrow_model)


def test_phrase_encoder_keeps_native_width(narrow_model):
    # phrase fields export whatever width the model has
    enc = PhraseEncoder(narrow_model)
    assert enc.dim == 64
    assert enc.encode_batch(TEXTS).shape == (3, 64)


def test_unloadable_identifier_is_setup_error(tmp_path):
    with pytest.raises(SetupError, match="cannot load encoder"):
        PhraseEncoder(str(tmp_path / "missing"))


def test_full_export_with_transformer_backend(records_csv, tmp_path, tiny_model):
    job = ExportJob(
        records=records_csv,
        out_dir=str(tmp_path / "a"),
        backend="transformer",
        phrase_model=tiny_model,
        sentence_model=tiny_model,
    )
    report = run_export(job)
    assert report["models"] == {"phrase": tiny_model, "sentence": tiny_model}
    for tag in ("mode", "reason", "effect", "decision"):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table = read_embeddings(tmp_path / "a" / f"{tag}.vec")
        assert caught == []
        assert table.dim == SENTENCE_DIM
        assert len(table.vectors) == 3

    # bit-identical rerun with the same weights
    rerun = ExportJob(
        records=records_csv,
        out_dir=str(tmp_path / "b"),
        backend="transformer",
        phrase_model=tiny_model,
        sentence_model=tiny_model,
    )
    run_export(rerun)
    for name in sorted(p.name for p in (tmp_path / "a").iterdir()):
        assert (tmp_path / "a" / name).read_bytes() == (
            tmp_path / "b" / name
        ).read_bytes()
