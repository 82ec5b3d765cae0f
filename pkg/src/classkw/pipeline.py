"""Per-class iterative extraction: batch, extract, score, promote seeds, merge."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import (
    DEFAULT_MIN_LEN,
    Batch,
    Document,
    SeedSet,
    load_stopwords,
    make_batches,
    shuffle_corpus,
)
from .embedding import Embedder, EmbedderSpec, get_embedder
from .extraction import extract_batch
from .scoring import ScoredCandidate, rank_candidates, select_new_seeds, sort_scored

log = logging.getLogger(__name__)

SEED_HEAD_ALL = "all"
SEED_HEAD_ORIGINAL = "original"


class ConfigError(ValueError):
    pass


class PipelineError(RuntimeError):
    def __init__(self, class_id: str, cause: Exception):
        super().__init__(f"class {class_id!r}: {cause}")
        self.class_id = class_id
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    n_iterations: int = 5
    percentile_newseed: float = 99.0
    number_newseed: int = 3
    topk: int = 100
    top_n_per_doc: int = 10
    embedder: EmbedderSpec = field(default_factory=EmbedderSpec)
    stopwords: str | None = None
    min_len: int = DEFAULT_MIN_LEN
    shuffle_seed: int | None = None
    seed_weight: float = 1.0
    seed_head: str = SEED_HEAD_ALL
    transliterate: bool = True

    def __post_init__(self) -> None:
        for name in ("n_iterations", "topk", "top_n_per_doc", "min_len"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.number_newseed < 0:
            raise ConfigError("number_newseed must be >= 0")
        if not 0 < self.percentile_newseed <= 100:
            raise ConfigError("percentile_newseed must be in (0, 100]")
        if not 0.0 <= self.seed_weight <= 1.0:
            raise ConfigError("seed_weight must be in [0, 1]")
        if self.seed_head not in (SEED_HEAD_ALL, SEED_HEAD_ORIGINAL):
            raise ConfigError(f"seed_head must be {SEED_HEAD_ALL!r} or {SEED_HEAD_ORIGINAL!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> "PipelineConfig":
        data = dict(data)
        emb = data.pop("embedder", None)
        if isinstance(emb, Mapping):
            data["embedder"] = EmbedderSpec(**emb)
        elif emb is not None:
            data["embedder"] = emb
        return cls(**data)


@dataclass
class ClassResult:
    class_id: str
    final_keywords: list[str]
    scores: dict[str, float]
    seed_history: list[list[str]]
    seeds: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "keywords": list(self.final_keywords),
            "scores": dict(self.scores),
            "seed_history": [list(h) for h in self.seed_history],
            "seeds": list(self.seeds),
        }

    @classmethod
    def from_dict(cls, class_id: str, data: Mapping) -> "ClassResult":
        return cls(
            class_id,
            list(data["keywords"]),
            {k: float(v) for k, v in data.get("scores", {}).items()},
            [list(h) for h in data.get("seed_history", [])],
            list(data.get("seeds", [])),
        )

    @property
    def augmented(self) -> list[str]:
        return [t for h in self.seed_history for t in h]


def run_iteration(
    batch: Batch,
    seeds: SeedSet,
    config: PipelineConfig,
    embedder: Embedder,
    stopwords: Iterable[str] = (),
    augment: bool = True,
    jobs: int = 1,
) -> tuple[list[ScoredCandidate], SeedSet]:
    """One batch: guided extraction, re-ranking, and (optionally) seed promotion."""
    if len(seeds) == 0:
        raise ValueError(f"class {seeds.class_id!r} has an empty seed set")
    terms = extract_batch(
        batch,
        seeds,
        embedder,
        config.top_n_per_doc,
        stopwords,
        config.min_len,
        config.seed_weight,
        jobs,
    )
    ranked = rank_candidates(terms, seeds, embedder, iteration=batch.index)
    if not augment:
        return ranked, seeds
    new = select_new_seeds(ranked, config.percentile_newseed, config.number_newseed, seeds)
    return ranked, seeds.extended(new)


def merge_results(per_iteration: Iterable[Sequence[ScoredCandidate]]) -> list[ScoredCandidate]:
    """Union over iterations keeping each term's best-scoring occurrence.

    On equal scores the earlier iteration wins.
    """
    best: dict[str, ScoredCandidate] = {}
    for ranked in per_iteration:
        for cand in ranked:
            prev = best.get(cand.term)
            if prev is None or cand.final_score > prev.final_score:
                best[cand.term] = cand
    return sort_scored(best.values())


def finalize(
    merged: Sequence[ScoredCandidate],
    seeds: SeedSet,
    topk: int,
    seed_head: str = SEED_HEAD_ALL,
) -> list[str]:
    """Seed block first, then merged candidates, cut to ``topk``."""
    head = seeds.terms if seed_head == SEED_HEAD_ALL else list(seeds.original)
    if topk < len(head):
        raise ConfigError(
            f"topk={topk} is smaller than the {len(head)} seeds of class {seeds.class_id!r}"
        )
    out = list(head)
    taken = set(head)
    for cand in merged:
        if len(out) >= topk:
            break
        if cand.term not in taken:
            taken.add(cand.term)
            out.append(cand.term)
    return out


def run_class(
    corpus: Sequence[Document],
    seeds: SeedSet,
    config: PipelineConfig,
    embedder: Embedder | None = None,
    stopwords: Iterable[str] | None = None,
    jobs: int = 1,
) -> ClassResult:
    embedder = embedder or get_embedder(config.embedder)
    if stopwords is None:
        stopwords = load_stopwords(config.stopwords, config.transliterate)
    stop = frozenset(stopwords)
    docs = corpus if config.shuffle_seed is None else shuffle_corpus(corpus, config.shuffle_seed)
    batches = make_batches(docs, config.n_iterations)
    ranked_per_iteration: list[list[ScoredCandidate]] = []
    history: list[list[str]] = []
    current = seeds
    for batch in batches:
        last = batch.index == len(batches) - 1
        ranked, updated = run_iteration(batch, current, config, embedder, stop, not last, jobs)
        ranked_per_iteration.append(ranked)
        added = updated.augmented[len(current.augmented) :]
        if not last:
            history.append(added)
        log.debug("class %s batch %d: %d candidates, new seeds %s",
                  seeds.class_id, batch.index, len(ranked), added)
        current = updated
    merged = merge_results(ranked_per_iteration)
    keywords = finalize(merged, current, config.topk, config.seed_head)
    merged_scores = {c.term: c.final_score for c in merged}
    scores = {t: merged_scores[t] for t in keywords if t in merged_scores}
    return ClassResult(seeds.class_id, keywords, scores, history, list(seeds.original))


def run_pipeline(
    corpus: Sequence[Document],
    class_seeds: Mapping[str, SeedSet],
    config: PipelineConfig,
    jobs: int = 1,
) -> dict[str, ClassResult]:
    """Run every class independently; results keep the input class order."""
    if not corpus:
        raise ConfigError("corpus is empty")
    for class_id, seeds in class_seeds.items():
        if len(seeds) == 0:
            raise PipelineError(class_id, ValueError("empty seed set"))
    embedder = get_embedder(config.embedder)
    stop = load_stopwords(config.stopwords, config.transliterate)

    def run(item: tuple[str, SeedSet]) -> ClassResult:
        class_id, seeds = item
        try:
            return run_class(corpus, seeds, config, embedder, stop)
        except Exception as exc:
            raise PipelineError(class_id, exc) from exc

    items = list(class_seeds.items())
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, items))
    else:
        results = [run(item) for item in items]
    return {r.class_id: r for r in results}


def dump_json(data, path: str | Path) -> None:
    text = json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_results(results: Mapping[str, ClassResult], path: str | Path) -> None:
    dump_json({cid: r.to_dict() for cid, r in results.items()}, path)


def load_results(path: str | Path) -> dict[str, ClassResult]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected an object mapping class id to results")
    return {cid: ClassResult.from_dict(cid, entry) for cid, entry in data.items()}
