"""Precision@K of extracted keyword lists under four matching schemes."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Collection, Iterable, Mapping, Sequence

from .corpus import GoldSet, normalize_text
from .embedding import Embedder, EmbedderSpec, cosine, get_embedder
from .pipeline import ClassResult

log = logging.getLogger(__name__)

EXACT = "exact"
LEMMA = "lemma"
FUZZY = "fuzzy"
COSINE = "cosine"
METHODS = (EXACT, LEMMA, FUZZY, COSINE)
METHOD_LABELS = {
    EXACT: "Exact Match",
    LEMMA: "Lemma Match",
    FUZZY: "Fuzzy Match",
    COSINE: "CS Match",
}
DEFAULT_KS = (10, 25, 50, 100)

Lemmatizer = Callable[[str], str]


class EvaluationError(ValueError):
    pass


class LemmaTable:
    """Lookup-table lemmatizer; unknown words are their own lemma."""

    def __init__(self, table: Mapping[str, str] | None = None):
        self.table = dict(table or {})

    def __call__(self, word: str) -> str:
        return self.table.get(word, word)

    def __len__(self) -> int:
        return len(self.table)


def identity_lemmatizer(word: str) -> str:
    return word


def load_lemma_table(path: str | Path, transliterate: bool = True) -> LemmaTable:
    """Read ``surface<TAB>lemma`` lines; both columns are normalized."""
    table: dict[str, str] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise EvaluationError(f"{path}:{lineno}: expected 'surface<TAB>lemma'")
            surface, lemma = (normalize_text(p.strip(), transliterate) for p in parts)
            table[surface] = lemma
    return LemmaTable(table)


def _terms(gold: GoldSet | Collection[str]) -> frozenset[str]:
    return gold.keywords if isinstance(gold, GoldSet) else frozenset(gold)


def filter_gold(
    gold: GoldSet,
    corpus_vocab: Collection[str],
    lemmatizer: Lemmatizer | None = None,
    mode: str = EXACT,
) -> GoldSet:
    """Keep gold terms attested in the corpus (by lemma in ``lemma`` mode)."""
    if mode == LEMMA:
        lemmatize = lemmatizer or identity_lemmatizer
        vocab_lemmas = {lemmatize(t) for t in corpus_vocab}
        kept = {g for g in gold.keywords if lemmatize(g) in vocab_lemmas}
    else:
        vocab = corpus_vocab if isinstance(corpus_vocab, (set, frozenset)) else set(corpus_vocab)
        kept = {g for g in gold.keywords if g in vocab}
    return GoldSet(gold.class_id, frozenset(kept))


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError("k must be >= 1")


def exact_hits(extracted: Sequence[str], gold: GoldSet | Collection[str], k: int) -> list[float]:
    """Per-slot exact-match scores (0 or 100) for the top ``k``, padded with zeros."""
    _check_k(k)
    terms = _terms(gold)
    top = list(extracted[:k])
    return [100.0 if t in terms else 0.0 for t in top] + [0.0] * (k - len(top))


def precision_at_k_exact(extracted: Sequence[str], gold: GoldSet | Collection[str], k: int) -> float:
    _check_k(k)
    terms = _terms(gold)
    hits = sum(1 for t in extracted[:k] if t in terms)
    return 100.0 * hits / k


def precision_at_k_lemma(
    extracted: Sequence[str],
    gold: GoldSet | Collection[str],
    k: int,
    lemmatizer: Lemmatizer | None = None,
) -> float:
    _check_k(k)
    lemmatize = lemmatizer or identity_lemmatizer
    gold_lemmas = {lemmatize(g) for g in _terms(gold)}
    hits = sum(1 for t in extracted[:k] if lemmatize(t) in gold_lemmas)
    return 100.0 * hits / k


def lcs_length(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0]
        for j, cb in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if ca == cb else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def fuzzy_ratio(a: str, b: str) -> float:
    """Indel similarity 100 * 2*LCS / (|a| + |b|); two empty strings score 100."""
    total = len(a) + len(b)
    if total == 0:
        return 100.0
    return 100.0 * 2 * lcs_length(a, b) / total


def fuzzy_slots(extracted: Sequence[str], gold: GoldSet | Collection[str], k: int) -> list[float]:
    _check_k(k)
    terms = sorted(_terms(gold))
    if not terms:
        raise EvaluationError("fuzzy matching needs a non-empty gold set")
    top = list(extracted[:k])
    slots = [max(fuzzy_ratio(t, g) for g in terms) for t in top]
    return slots + [0.0] * (k - len(top))


def fuzzy_match_score(extracted: Sequence[str], gold: GoldSet | Collection[str], k: int) -> float:
    return math.fsum(fuzzy_slots(extracted, gold, k)) / k


def _resolve_embedder(
    eval_embedder: Embedder | EmbedderSpec,
    extraction_spec: EmbedderSpec | None,
    allow_same_embedder: bool,
) -> Embedder:
    spec = eval_embedder.spec if isinstance(eval_embedder, Embedder) else eval_embedder
    if extraction_spec is not None and spec.same_model(extraction_spec) and not allow_same_embedder:
        raise EvaluationError(
            "cosine matching must use a different embedder than extraction "
            "(pass allow_same_embedder to override)"
        )
    return eval_embedder if isinstance(eval_embedder, Embedder) else get_embedder(spec)


def cosine_slots(
    extracted: Sequence[str],
    gold: GoldSet | Collection[str],
    k: int,
    eval_embedder: Embedder | EmbedderSpec,
    extraction_spec: EmbedderSpec | None = None,
    allow_same_embedder: bool = False,
) -> list[float]:
    _check_k(k)
    terms = sorted(_terms(gold))
    if not terms:
        raise EvaluationError("cosine matching needs a non-empty gold set")
    embedder = _resolve_embedder(eval_embedder, extraction_spec, allow_same_embedder)
    gold_vecs = embedder.embed_many(terms)
    top = list(extracted[:k])
    slots = []
    for vec in embedder.embed_many(top):
        best = max(cosine(vec, g) for g in gold_vecs)
        slots.append(max(0.0, 100.0 * best))
    return slots + [0.0] * (k - len(top))


def cosine_match_score(
    extracted: Sequence[str],
    gold: GoldSet | Collection[str],
    k: int,
    eval_embedder: Embedder | EmbedderSpec,
    extraction_spec: EmbedderSpec | None = None,
    allow_same_embedder: bool = False,
) -> float:
    slots = cosine_slots(extracted, gold, k, eval_embedder, extraction_spec, allow_same_embedder)
    return math.fsum(slots) / k


def _mean(values: Iterable[float]) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


@dataclass
class EvaluationReport:
    ks: list[int]
    classes: list[str]
    cells: dict[tuple[str, str, int], float]
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    settings: dict = field(default_factory=dict)

    def score(self, class_id: str, method: str, k: int) -> float:
        return self.cells[(class_id, method, k)]

    def method_average(self, method: str, k: int) -> float:
        """Mean over classes for one method and K."""
        return _mean(self.cells[(c, method, k)] for c in self.classes)

    def method_overall(self, method: str) -> float:
        """Mean over K of the per-K class averages."""
        return _mean(self.method_average(method, k) for k in self.ks)

    def average_match(self, k: int) -> float:
        """Mean over methods of the per-K class averages."""
        return _mean(self.method_average(m, k) for m in self.methods)

    def average_match_overall(self) -> float:
        return _mean(self.average_match(k) for k in self.ks)

    def to_dict(self) -> dict:
        classes = {
            c: {m: {str(k): self.cells[(c, m, k)] for k in self.ks} for m in self.methods}
            for c in self.classes
        }
        averages = {}
        for m in self.methods:
            row = {str(k): self.method_average(m, k) for k in self.ks}
            row["average"] = self.method_overall(m)
            averages[m] = row
        avg_match = {str(k): self.average_match(k) for k in self.ks}
        avg_match["average"] = self.average_match_overall()
        return {
            "ks": list(self.ks),
            "methods": list(self.methods),
            "classes": classes,
            "averages": averages,
            "average_match": avg_match,
            "settings": dict(self.settings),
        }

    def rows(self) -> list[tuple[str, str, int, float]]:
        """Long format ``(class, method, k, score)`` in report order."""
        return [
            (c, m, k, self.cells[(c, m, k)])
            for c in self.classes
            for m in self.methods
            for k in self.ks
        ]

    def to_table(self, label: str = "classkw") -> str:
        """Aligned plain-text table: one row per method plus Average Match."""
        headers = ["", ""] + [f"Precision@{k}" for k in self.ks] + ["Average"]
        body = []
        for m in self.methods:
            values = [self.method_average(m, k) for k in self.ks] + [self.method_overall(m)]
            body.append([METHOD_LABELS[m], label] + [f"{v:.2f}" for v in values])
        values = [self.average_match(k) for k in self.ks] + [self.average_match_overall()]
        body.append(["Average Match", label] + [f"{v:.2f}" for v in values])
        widths = [max(len(r[i]) for r in [headers, *body]) for i in range(len(headers))]
        lines = []
        for row in [headers, *body]:
            cells = [row[0].ljust(widths[0]), row[1].ljust(widths[1])]
            cells += [cell.rjust(w) for cell, w in zip(row[2:], widths[2:])]
            lines.append("  ".join(cells).rstrip())
        rule = "-" * len(lines[0])
        return "\n".join([lines[0], rule, *lines[1:]]) + "\n"


def _seed_terms(result: ClassResult) -> set[str]:
    return set(result.seeds) | set(result.augmented)


def evaluate_all(
    results: Mapping[str, ClassResult],
    gold: Mapping[str, GoldSet],
    ks: Sequence[int] = DEFAULT_KS,
    lemmatizer: Lemmatizer | None = None,
    eval_embedder: Embedder | EmbedderSpec | None = None,
    corpus_vocab: Collection[str] | None = None,
    exclude_seeds: bool = False,
    extraction_spec: EmbedderSpec | None = None,
    allow_same_embedder: bool = False,
    methods: Sequence[str] = METHODS,
) -> EvaluationReport:
    """Fill the class x method x K grid.

    With ``corpus_vocab`` the gold sets are first restricted to attested terms
    (by lemma for lemma matching).  ``exclude_seeds`` drops original and
    augmented seeds from each keyword list before cutting at K.  A class whose
    filtered gold set is empty scores 0 under fuzzy and cosine matching.
    """
    if set(results) != set(gold):
        missing = sorted(set(gold) - set(results))
        extra = sorted(set(results) - set(gold))
        raise EvaluationError(f"class mismatch: missing results {missing}, no gold for {extra}")
    ks = list(ks)
    if not ks or any(k < 1 for k in ks):
        raise EvaluationError("ks must be a non-empty list of positive integers")
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise EvaluationError(f"unknown matching methods {sorted(unknown)}")
    lemmatize = lemmatizer or identity_lemmatizer
    if COSINE in methods:
        if eval_embedder is None:
            raise EvaluationError("cosine matching needs an evaluation embedder")
        embedder = _resolve_embedder(eval_embedder, extraction_spec, allow_same_embedder)

    classes = sorted(results)
    cells: dict[tuple[str, str, int], float] = {}
    for cid in classes:
        result = results[cid]
        extracted = result.final_keywords
        if exclude_seeds:
            seeds = _seed_terms(result)
            extracted = [t for t in extracted if t not in seeds]
        gold_exact = gold[cid]
        gold_lemma = gold[cid]
        if corpus_vocab is not None:
            gold_exact = filter_gold(gold[cid], corpus_vocab, lemmatize, EXACT)
            gold_lemma = filter_gold(gold[cid], corpus_vocab, lemmatize, LEMMA)
        if not gold_exact.keywords and (FUZZY in methods or COSINE in methods):
            log.warning("class %s: no gold keywords left after filtering", cid)
        for k in ks:
            for m in methods:
                if m == EXACT:
                    value = precision_at_k_exact(extracted, gold_exact, k)
                elif m == LEMMA:
                    value = precision_at_k_lemma(extracted, gold_lemma, k, lemmatize)
                elif not gold_exact.keywords:
                    value = 0.0
                elif m == FUZZY:
                    value = fuzzy_match_score(extracted, gold_exact, k)
                else:
                    value = cosine_match_score(extracted, gold_exact, k, embedder)
                cells[(cid, m, k)] = value
    settings = {"exclude_seeds": exclude_seeds, "filtered": corpus_vocab is not None}
    if COSINE in methods:
        settings["eval_embedder"] = embedder.spec.fingerprint()
    return EvaluationReport(ks, classes, cells, list(methods), settings)
