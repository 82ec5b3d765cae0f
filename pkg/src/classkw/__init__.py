"""Class-specific keyword extraction guided by seed keywords."""

from .corpus import (
    Batch,
    Document,
    GoldSet,
    SeedSet,
    extract_candidates,
    load_corpus,
    make_batches,
    normalize_text,
    prepare_seeds,
    seed_sets_from_mapping,
)
from .embedding import EmbedderSpec, centroid, cosine, embed_term, get_embedder
from .evaluation import EvaluationReport, evaluate_all
from .pipeline import ClassResult, PipelineConfig, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "Batch",
    "ClassResult",
    "Document",
    "EmbedderSpec",
    "EvaluationReport",
    "GoldSet",
    "PipelineConfig",
    "SeedSet",
    "centroid",
    "cosine",
    "embed_term",
    "evaluate_all",
    "extract_candidates",
    "get_embedder",
    "load_corpus",
    "make_batches",
    "normalize_text",
    "prepare_seeds",
    "run_pipeline",
    "seed_sets_from_mapping",
]
