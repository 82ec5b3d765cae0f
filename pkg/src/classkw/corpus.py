"""Corpus ingestion, normalization, tokenization and seed/gold preparation."""

from __future__ import annotations

import json
import logging
import random
import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

log = logging.getLogger(__name__)

TRANSLITERATIONS = {
    "ä": "ae",
    "ö": "oe",
    "ü": "ue",
    "Ä": "Ae",
    "Ö": "Oe",
    "Ü": "Ue",
    "ß": "ss",
    "ẞ": "SS",
}
_TRANSLIT_TABLE = str.maketrans(TRANSLITERATIONS)

# letters and digits, no underscore
_TOKEN_RE = re.compile(r"[^\W_]+")

DEFAULT_MIN_LEN = 2


class CorpusError(ValueError):
    """Raised for unreadable or inconsistent corpus and keyword files."""


@dataclass(frozen=True)
class Document:
    id: str
    text: str


@dataclass(frozen=True)
class Batch:
    index: int
    documents: tuple[Document, ...]


@dataclass
class SeedSet:
    """Seed keywords of one class.

    ``original`` holds the user supplied seeds, ``augmented`` the terms
    promoted by the iterations, in the order they were added.
    """

    class_id: str
    original: list[str]
    augmented: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for term in [*self.original, *self.augmented]:
            if term in seen:
                raise ValueError(f"duplicate seed {term!r} for class {self.class_id!r}")
            seen.add(term)

    @property
    def terms(self) -> list[str]:
        return [*self.original, *self.augmented]

    def __contains__(self, term: object) -> bool:
        return term in self.original or term in self.augmented

    def __len__(self) -> int:
        return len(self.original) + len(self.augmented)

    def extended(self, new_terms: Iterable[str]) -> "SeedSet":
        """Return a copy with ``new_terms`` appended to the augmented seeds."""
        augmented = list(self.augmented)
        for term in new_terms:
            if term not in self and term not in augmented:
                augmented.append(term)
        return SeedSet(self.class_id, list(self.original), augmented)


@dataclass(frozen=True)
class GoldSet:
    class_id: str
    keywords: frozenset[str]


def normalize_text(raw: str, transliterate: bool = True) -> str:
    """NFC-normalize, transliterate German umlauts and lowercase."""
    text = unicodedata.normalize("NFC", raw)
    if transliterate:
        text = text.translate(_TRANSLIT_TABLE)
    return text.lower()


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def load_corpus(path: str | Path, transliterate: bool = True) -> list[Document]:
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"corpus file not found: {path}")
    documents: list[Document] = []
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(record, dict):
                raise CorpusError(f"{path}:{lineno}: expected a JSON object")
            doc_id, text = record.get("id"), record.get("text")
            if not isinstance(doc_id, str) or not doc_id:
                raise CorpusError(f"{path}:{lineno}: missing or invalid 'id' field")
            if not isinstance(text, str):
                raise CorpusError(f"{path}:{lineno}: missing or invalid 'text' field")
            if doc_id in seen:
                raise CorpusError(
                    f"{path}:{lineno}: duplicate id {doc_id!r} (first seen on line {seen[doc_id]})"
                )
            seen[doc_id] = lineno
            documents.append(Document(doc_id, normalize_text(text, transliterate)))
    return documents


def load_stopwords(path: str | Path | None = None, transliterate: bool = True) -> frozenset[str]:
    """Read a one-token-per-line stopword file; ``None`` loads the bundled German list."""
    if path is None:
        text = resources.files("classkw.data").joinpath("stopwords_de.txt").read_text("utf-8")
    else:
        path = Path(path)
        if not path.is_file():
            raise CorpusError(f"stopword file not found: {path}")
        text = path.read_text(encoding="utf-8")
    words = (normalize_text(line.strip(), transliterate) for line in text.splitlines())
    return frozenset(w for w in words if w and not w.startswith("#"))


def load_keyword_file(path: str | Path) -> dict[str, list[str]]:
    """Read a ``{class_id: [keyword, ...]}`` JSON file, keeping entries verbatim."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"keyword file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise CorpusError(f"{path}: expected an object mapping class id to keyword list")
    out: dict[str, list[str]] = {}
    for class_id, keywords in data.items():
        if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
            raise CorpusError(f"{path}: class {class_id!r} must map to a list of strings")
        out[class_id] = keywords
    return out


def _dedupe_normalized(keywords: Iterable[str], transliterate: bool = True) -> list[str]:
    out: list[str] = []
    seen: set[str] = set()
    for kw in keywords:
        term = normalize_text(kw.strip(), transliterate)
        if term and term not in seen:
            seen.add(term)
            out.append(term)
    return out


def seed_sets_from_mapping(
    mapping: Mapping[str, Sequence[str]], transliterate: bool = True
) -> dict[str, SeedSet]:
    """Normalize raw seed lists into SeedSets, dropping duplicates."""
    return {cid: SeedSet(cid, _dedupe_normalized(kws, transliterate)) for cid, kws in mapping.items()}


def gold_sets_from_mapping(
    mapping: Mapping[str, Sequence[str]], transliterate: bool = True
) -> dict[str, GoldSet]:
    return {
        cid: GoldSet(cid, frozenset(_dedupe_normalized(kws, transliterate)))
        for cid, kws in mapping.items()
    }


def extract_candidates(
    doc: Document | str, stopwords: Iterable[str] = (), min_len: int = DEFAULT_MIN_LEN
) -> set[str]:
    """Distinct unigram candidates of a normalized document.

    Tokens are maximal letter/digit runs; tokens shorter than ``min_len``,
    stopwords and all-digit tokens are dropped.
    """
    text = doc.text if isinstance(doc, Document) else doc
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return {
        tok
        for tok in tokenize(text)
        if len(tok) >= min_len and not tok.isdigit() and tok not in stop
    }


def corpus_vocabulary(corpus: Sequence[Document]) -> set[str]:
    """Raw token vocabulary of a corpus, without stopword or length filtering."""
    vocab: set[str] = set()
    for doc in corpus:
        vocab |= extract_candidates(doc, (), min_len=1)
    return vocab


def make_batches(corpus: Sequence[Document], n_iterations: int) -> list[Batch]:
    """Split the corpus into contiguous batches whose sizes differ by at most one.

    The number of batches is clamped to the corpus size; larger batches come first.
    """
    if not corpus:
        raise CorpusError("cannot batch an empty corpus")
    if n_iterations < 1:
        raise ValueError("n_iterations must be >= 1")
    k = min(n_iterations, len(corpus))
    size, remainder = divmod(len(corpus), k)
    batches = []
    start = 0
    for index in range(k):
        stop = start + size + (1 if index < remainder else 0)
        batches.append(Batch(index, tuple(corpus[start:stop])))
        start = stop
    return batches


def shuffle_corpus(corpus: Sequence[Document], seed: int) -> list[Document]:
    docs = list(corpus)
    random.Random(seed).shuffle(docs)
    return docs


def truncate_keyphrase(phrase: str) -> str:
    """First whitespace-delimited word of a keyphrase, stripped of edge punctuation."""
    for word in phrase.split():
        word = word.strip(".,;:!?()[]{}\"'-/")
        if word:
            return word
    return ""


def prepare_seeds(
    gold_pool: Mapping[str, Sequence[str]],
    per_class: int = 10,
    rng_seed: int = 0,
    transliterate: bool = True,
) -> tuple[dict[str, list[str]], dict[str, list[str]]]:
    """Sample ``per_class`` seeds from each class pool; the rest becomes the gold set.

    Keyphrases are truncated to their first word and deduplicated on their
    normalized form before sampling.  Returned keywords keep their surface form
    (truncated), seeds in sampling order and gold keywords in pool order.
    Each class draws from its own RNG stream, so the split of one class does
    not depend on which other classes are present.
    """
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    seeds: dict[str, list[str]] = {}
    gold: dict[str, list[str]] = {}
    for class_id, pool in gold_pool.items():
        entries: list[str] = []
        seen: set[str] = set()
        for phrase in pool:
            word = truncate_keyphrase(phrase)
            key = normalize_text(word, transliterate)
            if key and key not in seen:
                seen.add(key)
                entries.append(word)
        if len(entries) < per_class:
            raise CorpusError(
                f"class {class_id!r} has {len(entries)} distinct keywords, need {per_class}"
            )
        rng = random.Random(f"{rng_seed}:{class_id}")
        picked = rng.sample(range(len(entries)), per_class)
        picked_set = set(picked)
        seeds[class_id] = [entries[i] for i in picked]
        gold[class_id] = [e for i, e in enumerate(entries) if i not in picked_set]
    return seeds, gold
