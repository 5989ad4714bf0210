"""Keyword-combination retrieval tuning and fused-feature graph dataset
construction for failure-mode records.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DataError, FgfError, StageError
from .keywords import (
    KeywordTaxonomy,
    KeywordWeights,
    expand_keywords,
    load_taxonomy,
    update_weights,
)
from .corpus import Document, MatchProfile, dedup, load_offline, match_counts, save_offline
from .optimizer import RunConfig, RunHistory, run, run_csa, run_hncsa, run_nsga2
from .frontier import (
    fitted_front_hypervolume,
    hypervolume_exact2d,
    hypervolume_paper,
    normalize_objectives,
    pareto_front,
    retrieval_metrics,
)
from .embeddings import EmbeddingTable, hash_embed, read_embeddings, train_sgns, write_embeddings
from .fusion import (
    FusionWeights,
    fuse,
    kpca_fit,
    kpca_project,
    standardize,
    weight_attention,
    weight_hierarchy,
    weight_verbs,
    weighted_ce_loss,
)
from .graphset import FailureRecord, assemble, export, format_id, ingest_edges, ingest_records, parse_id
from .validate import cosine_block_stats, kmeans, silhouette

__all__ = [
    "__version__",
    "FgfError",
    "ConfigError",
    "DataError",
    "StageError",
    "KeywordTaxonomy",
    "KeywordWeights",
    "expand_keywords",
    "load_taxonomy",
    "update_weights",
    "Document",
    "MatchProfile",
    "dedup",
    "load_offline",
    "match_counts",
    "save_offline",
    "RunConfig",
    "RunHistory",
    "run",
    "run_csa",
    "run_hncsa",
    "run_nsga2",
    "normalize_objectives",
    "pareto_front",
    "hypervolume_paper",
    "hypervolume_exact2d",
    "fitted_front_hypervolume",
    "retrieval_metrics",
    "EmbeddingTable",
    "hash_embed",
    "read_embeddings",
    "train_sgns",
    "write_embeddings",
    "kpca_fit",
    "kpca_project",
    "weight_hierarchy",
    "weight_attention",
    "weight_verbs",
    "FusionWeights",
    "fuse",
    "standardize",
    "weighted_ce_loss",
    "FailureRecord",
    "parse_id",
    "format_id",
    "ingest_records",
    "ingest_edges",
    "assemble",
    "export",
    "cosine_block_stats",
    "kmeans",
    "silhouette",
]
