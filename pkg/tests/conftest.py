from __future__ import annotations

import sys
from pathlib import Path

import pytest

from classkw.corpus import load_stopwords
from classkw.embedding import EmbedderSpec, get_embedder

TESTS = Path(__file__).parent
sys.path.insert(0, str(TESTS))

FIXTURES = Path(__file__).parents[1] / "src" / "classkw" / "data" / "synthetic"
GOLDEN = TESTS / "golden"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture
def hash_spec() -> EmbedderSpec:
    return EmbedderSpec("hash-ngram", dim=64)


@pytest.fixture
def embedder(hash_spec):
    return get_embedder(hash_spec)
