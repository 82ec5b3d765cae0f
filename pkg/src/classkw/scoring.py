"""Two-part candidate scoring and percentile-gated seed promotion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .corpus import SeedSet
from .embedding import Embedder, cosine

# Scores equal to this many decimals are treated as ties and ordered by term.
# Mathematically equal cosines may differ in the last ulp depending on
# summation order, so comparing raw floats would make ties platform-dependent.
SCORE_DECIMALS = 12


def rank_key(score: float, term: str) -> tuple[float, str]:
    """Sort key giving descending score, then ascending term."""
    return (-round(score, SCORE_DECIMALS), term)


@dataclass(frozen=True)
class ScoredCandidate:
    term: str
    avg_score: float
    max_score: float
    final_score: float
    iteration: int = 0

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "avg_score": self.avg_score,
            "max_score": self.max_score,
            "final_score": self.final_score,
            "iteration": self.iteration,
        }


def _seed_cosines(candidate_vec: np.ndarray, seed_vecs: Sequence[np.ndarray]) -> list[float]:
    if len(seed_vecs) == 0:
        raise ValueError("scoring needs at least one seed vector")
    return [cosine(candidate_vec, s) for s in seed_vecs]


def average_score(candidate_vec: np.ndarray, seed_vecs: Sequence[np.ndarray]) -> float:
    sims = _seed_cosines(candidate_vec, seed_vecs)
    return math.fsum(sims) / len(sims)


def max_score(candidate_vec: np.ndarray, seed_vecs: Sequence[np.ndarray]) -> float:
    return max(_seed_cosines(candidate_vec, seed_vecs))


def final_score(avg: float, max_: float) -> float:
    return (avg + max_) / 2


def score_candidate(
    term: str, candidate_vec: np.ndarray, seed_vecs: Sequence[np.ndarray], iteration: int = 0
) -> ScoredCandidate:
    sims = _seed_cosines(candidate_vec, seed_vecs)
    avg = math.fsum(sims) / len(sims)
    mx = max(sims)
    return ScoredCandidate(term, avg, mx, final_score(avg, mx), iteration)


def sort_scored(candidates: Iterable[ScoredCandidate]) -> list[ScoredCandidate]:
    return sorted(candidates, key=lambda c: rank_key(c.final_score, c.term))


def rank_candidates(
    terms: Iterable[str], seeds: SeedSet, embedder: Embedder, iteration: int = 0
) -> list[ScoredCandidate]:
    """Score every term against the full current seed set and sort best first."""
    seed_terms = seeds.terms
    if not seed_terms:
        raise ValueError(f"class {seeds.class_id!r} has an empty seed set")
    seed_vecs = embedder.embed_many(seed_terms)
    terms = sorted(set(terms))
    vecs = embedder.embed_many(terms)
    return sort_scored(score_candidate(t, v, seed_vecs, iteration) for t, v in zip(terms, vecs))


def nearest_rank_threshold(scores: Sequence[float], percentile: float) -> float:
    """Value at 1-based position ceil(percentile/100 * N) of the ascending scores."""
    if not 0 < percentile <= 100:
        raise ValueError("percentile must be in (0, 100]")
    if not scores:
        raise ValueError("percentile of an empty score list")
    ordered = sorted(scores)
    rank = math.ceil(Fraction(percentile) * len(ordered) / 100)
    return ordered[max(rank, 1) - 1]


def select_new_seeds(
    ranked: Sequence[ScoredCandidate],
    percentile: float,
    n: int,
    existing: SeedSet | Iterable[str] = (),
) -> list[str]:
    """Up to ``n`` best-first terms scoring at or above the nearest-rank percentile.

    Terms already among ``existing`` seeds are skipped without consuming a slot.
    """
    if not ranked or n <= 0:
        return []
    threshold = nearest_rank_threshold([c.final_score for c in ranked], percentile)
    exclude = set(existing.terms) if isinstance(existing, SeedSet) else set(existing)
    picked: list[str] = []
    for cand in ranked:
        if len(picked) == n:
            break
        if cand.final_score < threshold or cand.term in exclude or cand.term in picked:
            continue
        picked.append(cand.term)
    return picked
