"""Phrase and sentence embedding file exporter for failure records."""

from .encoders import SENTENCE_DIM, HashNgramEncoder, PhraseEncoder, SentenceEncoder
from .errors import ExportError, InputError, SetupError
from .job import (
    DEFAULT_PHRASE_MODEL,
    DEFAULT_SENTENCE_MODEL,
    FIELD_TAGS,
    PHRASE_FIELDS,
    SENTENCE_FIELDS,
    ExportJob,
    run_export,
)
from .records import RECORD_FIELDS, TEXT_FIELDS, read_records

__version__ = "0.1.0"

__all__ = [
    "SENTENCE_DIM",
    "HashNgramEncoder",
    "PhraseEncoder",
    "SentenceEncoder",
    "ExportError",
    "InputError",
    "SetupError",
    "DEFAULT_PHRASE_MODEL",
    "DEFAULT_SENTENCE_MODEL",
    "FIELD_TAGS",
    "PHRASE_FIELDS",
    "SENTENCE_FIELDS",
    "ExportJob",
    "run_export",
    "RECORD_FIELDS",
    "TEXT_FIELDS",
    "read_records",
    "__version__",
]
