"""Term embedders and the similarity primitives built on them.

Two backends are available:

``hash-ngram``
    Signed feature hashing of the character n-grams of ``#term#`` into a
    fixed number of buckets, L2-normalized.  Deterministic across processes
    and platforms, needs no model files, and gives string-similar terms
    similar vectors.

``transformer-artifact``
    A sentence encoder saved on disk (Hugging Face layout: config, weights and
    tokenizer files in one directory).  Token vectors are mean-pooled over the
    attention mask and L2-normalized.

Vectors are read-only ``float64`` numpy arrays.  A term with no features
embeds to the zero vector; :func:`is_featureless` detects it and
:func:`cosine` treats it as dissimilar to everything.
"""

from __future__ import annotations

import json
import os
import threading
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

HASH_NGRAM = "hash-ngram"
TRANSFORMER = "transformer-artifact"
BACKENDS = (HASH_NGRAM, TRANSFORMER)

MODEL_PATH_ENV = "CLASSKW_MODEL_PATH"

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


class EmbeddingError(RuntimeError):
    pass


class ZeroVectorWarning(RuntimeWarning):
    """Cosine similarity was requested against a feature-less (zero) vector."""


@dataclass(frozen=True)
class EmbedderSpec:
    backend: str = HASH_NGRAM
    dim: int = 256
    ngram: int = 3
    model_path: str | None = None

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown embedder backend {self.backend!r}; choose from {BACKENDS}")
        if self.dim < 2:
            raise ValueError("embedding dim must be >= 2")
        if self.ngram < 1:
            raise ValueError("ngram size must be >= 1")

    def fingerprint(self) -> str:
        fields = asdict(self)
        if self.backend == HASH_NGRAM:
            fields.pop("model_path")
        else:
            fields.pop("ngram")
        return json.dumps(fields, sort_keys=True)

    def same_model(self, other: "EmbedderSpec") -> bool:
        return self.fingerprint() == other.fingerprint()


def fnv1a_64(data: bytes) -> int:
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


def char_ngrams(term: str, n: int = 3) -> list[str]:
    padded = f"#{term}#"
    return [padded[i : i + n] for i in range(len(padded) - n + 1)]


def is_featureless(vec: np.ndarray) -> bool:
    return not np.any(vec)


def _freeze(vec: np.ndarray) -> np.ndarray:
    vec.setflags(write=False)
    return vec


def _l2_normalize(vec: np.ndarray) -> np.ndarray:
    norm = np.sqrt(np.dot(vec, vec))
    if norm > 0:
        vec = vec / norm
    return vec


class Embedder:
    """Base class: caches vectors per term, thread-safe for concurrent lookups."""

    def __init__(self, spec: EmbedderSpec):
        self.spec = spec
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self.spec.dim

    def _compute(self, terms: Sequence[str]) -> list[np.ndarray]:
        raise NotImplementedError

    def embed(self, term: str) -> np.ndarray:
        vec = self._cache.get(term)
        if vec is None:
            vec = self.embed_many([term])[0]
        return vec

    def embed_many(self, terms: Iterable[str]) -> list[np.ndarray]:
        terms = list(terms)
        missing = [t for t in dict.fromkeys(terms) if t not in self._cache]
        if missing:
            if any(not t for t in missing):
                raise ValueError("cannot embed an empty term")
            computed = self._compute(missing)
            with self._lock:
                for term, vec in zip(missing, computed):
                    self._cache.setdefault(term, _freeze(vec))
        return [self._cache[t] for t in terms]

    def cache_size(self) -> int:
        return len(self._cache)


class HashNgramEmbedder(Embedder):
    def _compute(self, terms: Sequence[str]) -> list[np.ndarray]:
        return [self._hash_vector(t) for t in terms]

    def _hash_vector(self, term: str) -> np.ndarray:
        dim = self.spec.dim
        vec = np.zeros(dim, dtype=np.float64)
        for gram in char_ngrams(term, self.spec.ngram):
            h = fnv1a_64(gram.encode("utf-8"))
            sign = -1.0 if (h >> 63) & 1 else 1.0
            vec[h % dim] += sign
        return _l2_normalize(vec)


class TransformerEmbedder(Embedder):
    """Mean-pooled encoder loaded from a local model directory."""

    def __init__(self, spec: EmbedderSpec):
        super().__init__(spec)
        path = spec.model_path or os.environ.get(MODEL_PATH_ENV)
        if not path:
            raise EmbeddingError(
                f"transformer backend needs a model path (flag or ${MODEL_PATH_ENV})"
            )
        if not Path(path).is_dir():
            raise EmbeddingError(f"model artifact not found: {path}")
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:  # pragma: no cover - depends on environment
            raise EmbeddingError("transformer backend requires torch and transformers") from exc
        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(path, local_files_only=True)
        self._model = AutoModel.from_pretrained(path, local_files_only=True)
        self._model.eval()
        hidden = self._model.config.hidden_size
        if hidden != spec.dim:
            raise EmbeddingError(
                f"model at {path} produces {hidden}-dim vectors, configured dim is {spec.dim}"
            )

    def _compute(self, terms: Sequence[str]) -> list[np.ndarray]:
        torch = self._torch
        out: list[np.ndarray] = []
        for start in range(0, len(terms), 64):
            chunk = list(terms[start : start + 64])
            enc = self._tokenizer(chunk, padding=True, truncation=True, return_tensors="pt")
            with torch.no_grad():
                hidden = self._model(**enc).last_hidden_state
            mask = enc["attention_mask"].unsqueeze(-1).to(hidden.dtype)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
            for row in pooled.double().numpy():
                out.append(_l2_normalize(np.array(row, dtype=np.float64)))
        return out


_registry: dict[str, Embedder] = {}
_registry_lock = threading.Lock()


def get_embedder(spec: EmbedderSpec) -> Embedder:
    """Shared embedder instance (and cache) for ``spec``."""
    key = spec.fingerprint()
    with _registry_lock:
        embedder = _registry.get(key)
        if embedder is None:
            cls = HashNgramEmbedder if spec.backend == HASH_NGRAM else TransformerEmbedder
            embedder = cls(spec)
            _registry[key] = embedder
    return embedder


def embed_term(spec: EmbedderSpec, term: str) -> np.ndarray:
    return get_embedder(spec).embed(term)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity clipped to [-1, 1]; 0.0 if either side is the zero vector."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    na = np.sqrt(np.dot(a, a))
    nb = np.sqrt(np.dot(b, b))
    if na == 0.0 or nb == 0.0:
        warnings.warn("cosine against a zero vector, returning 0", ZeroVectorWarning, stacklevel=2)
        return 0.0
    value = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, value))


def centroid(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Componentwise mean, not renormalized."""
    if len(vectors) == 0:
        raise ValueError("centroid of an empty vector list")
    dims = {v.shape for v in vectors}
    if len(dims) != 1:
        raise ValueError("centroid over vectors of different dimension")
    return np.mean(np.stack(vectors), axis=0)
