"""Seed-guided candidate extraction per document and per batch."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .corpus import DEFAULT_MIN_LEN, Batch, Document, SeedSet, extract_candidates
from .embedding import Embedder, centroid, cosine
from .scoring import rank_key


@dataclass(frozen=True)
class GuidedCandidate:
    term: str
    seed_similarity: float
    source_doc: str


def guidance_vector(
    seeds: SeedSet, embedder: Embedder, doc: Document | None = None, seed_weight: float = 1.0
) -> np.ndarray:
    """Query vector candidates are compared against.

    With ``seed_weight`` 1.0 this is the plain seed centroid and the document
    text is never embedded.  Lower weights blend in the embedding of the
    document text, as stock guided extraction does.
    """
    if len(seeds) == 0:
        raise ValueError(f"class {seeds.class_id!r} has an empty seed set")
    if not 0.0 <= seed_weight <= 1.0:
        raise ValueError("seed_weight must be in [0, 1]")
    seed_center = centroid(embedder.embed_many(seeds.terms))
    if seed_weight == 1.0:
        return seed_center
    if doc is None:
        raise ValueError("blending with the document needs the document")
    doc_vec = embedder.embed(doc.text) if doc.text else np.zeros(embedder.dim)
    return seed_weight * seed_center + (1.0 - seed_weight) * doc_vec


def guided_extract(
    doc: Document,
    seeds: SeedSet,
    embedder: Embedder,
    top_n: int = 10,
    stopwords: Iterable[str] = (),
    min_len: int = DEFAULT_MIN_LEN,
    seed_weight: float = 1.0,
    query: np.ndarray | None = None,
) -> list[GuidedCandidate]:
    """Top ``top_n`` document candidates by cosine to the seed centroid.

    Seed terms are never returned.  Ties are broken by ascending term.
    ``query`` may carry a precomputed guidance vector (only meaningful with
    ``seed_weight`` 1.0, where it does not depend on the document).
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if query is None:
        query = guidance_vector(seeds, embedder, doc, seed_weight)
    elif len(seeds) == 0:
        raise ValueError(f"class {seeds.class_id!r} has an empty seed set")
    terms = sorted(t for t in extract_candidates(doc, stopwords, min_len) if t not in seeds)
    if not terms:
        return []
    scored = [
        GuidedCandidate(term, cosine(vec, query), doc.id)
        for term, vec in zip(terms, embedder.embed_many(terms))
    ]
    scored.sort(key=lambda c: rank_key(c.seed_similarity, c.term))
    return scored[:top_n]


def extract_batch(
    batch: Batch,
    seeds: SeedSet,
    embedder: Embedder,
    top_n: int = 10,
    stopwords: Iterable[str] = (),
    min_len: int = DEFAULT_MIN_LEN,
    seed_weight: float = 1.0,
    jobs: int = 1,
) -> set[str]:
    """Union of the guided candidates of every document in the batch."""
    stop = frozenset(stopwords)
    query = guidance_vector(seeds, embedder) if seed_weight == 1.0 else None

    def run(doc: Document) -> list[GuidedCandidate]:
        return guided_extract(doc, seeds, embedder, top_n, stop, min_len, seed_weight, query)

    if jobs > 1 and len(batch.documents) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_doc = list(pool.map(run, batch.documents))
    else:
        per_doc = [run(doc) for doc in batch.documents]
    return {c.term for cands in per_doc for c in cands}
