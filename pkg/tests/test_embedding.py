import math
import random
import subprocess
import sys
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from classkw.embedding import (
    EmbedderSpec,
    EmbeddingError,
    ZeroVectorWarning,
    centroid,
    char_ngrams,
    cosine,
    embed_term,
    fnv1a_64,
    get_embedder,
    is_featureless,
)

terms = st.text(alphabet="abcdefghijklmnopqrstuvwxyzäö", min_size=1, max_size=16)


def unit(values):
    v = np.asarray(values, dtype=float)
    return v / np.linalg.norm(v)


def test_fnv1a_known_vectors():
    # published FNV-1a 64-bit test vectors
    assert fnv1a_64(b"") == 0xCBF29CE484222325
    assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a_64(b"foobar") == 0x85944171F73967E8


def test_char_ngrams_padding():
    assert char_ngrams("ab") == ["#ab", "ab#"]
    assert char_ngrams("tabak", 4) == ["#tab", "taba", "abak", "bak#"]


def test_same_term_twice_is_bitwise_identical(hash_spec):
    a = embed_term(hash_spec, "tabak")
    b = get_embedder(EmbedderSpec("hash-ngram", dim=64)).embed("tabak")
    assert a.tobytes() == b.tobytes()


def test_deterministic_across_processes():
    code = ("from classkw.embedding import *;"
            "print(embed_term(EmbedderSpec(dim=32), 'fischzucht').tobytes().hex())")
    outs = {subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                           check=True).stdout for _ in range(2)}
    here = embed_term(EmbedderSpec(dim=32), "fischzucht").tobytes().hex()
    assert outs == {here + "\n"}


def test_dim8_buckets_match_trigram_oracle():
    vec = embed_term(EmbedderSpec(dim=8), "ab")
    expected = {b for b, c in oracles.trigram_buckets("ab", 8).items() if c != 0}
    assert set(np.flatnonzero(vec)) == expected
    assert np.allclose(vec, oracles.hash_vector("ab", 8), atol=1e-15)


@given(terms, st.sampled_from([4, 16, 64, 256]), st.sampled_from([2, 3, 4]))
def test_matches_oracle_vector(term, dim, n):
    vec = embed_term(EmbedderSpec(dim=dim, ngram=n), term)
    assert np.allclose(vec, oracles.hash_vector(term, dim, n), atol=1e-12)


@given(terms)
def test_unit_norm(term):
    vec = embed_term(EmbedderSpec(dim=256), term)
    if not is_featureless(vec):
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-9


def test_featureless_term_is_zero_vector():
    # find a term whose two trigrams cancel in an 2-bucket space
    spec = EmbedderSpec(dim=2)
    zero = next(t for t in ("ab", "cd", "ef", "gh", "ij", "kl", "mn", "op", "qr", "st",
                            "uv", "wx", "yz", "ba", "dc", "fe")
                if not any(oracles.trigram_buckets(t, 2).values()))
    vec = embed_term(spec, zero)
    assert is_featureless(vec)
    with pytest.warns(ZeroVectorWarning):
        assert cosine(vec, embed_term(spec, "tabak")) == 0.0


def test_empty_term_rejected(hash_spec):
    with pytest.raises(ValueError):
        embed_term(hash_spec, "")


def test_string_similar_terms_are_closer():
    spec = EmbedderSpec(dim=256)
    e = lambda t: embed_term(spec, t)  # noqa: E731
    near = cosine(e("energieanlagen"), e("energieerzeugung"))
    far = cosine(e("energieanlagen"), e("tabak"))
    shared = set(oracles.trigram_buckets("energieanlagen", 2**62)) & set(
        oracles.trigram_buckets("energieerzeugung", 2**62))
    assert len(shared) >= 3
    assert near > far


def test_locality_statistically():
    rng = random.Random(11)
    letters = "abcdefgh"
    vocab = ["".join(rng.choice(letters) for _ in range(rng.randint(5, 10))) for _ in range(300)]
    spec = EmbedderSpec(dim=256)

    def grams(t):
        p = "#" + t + "#"
        return {p[i:i + 3] for i in range(len(p) - 2)}

    sharing, disjoint = [], []
    for _ in range(4000):
        a, b = rng.sample(vocab, 2)
        c = cosine(embed_term(spec, a), embed_term(spec, b))
        (sharing if grams(a) & grams(b) else disjoint).append(c)
    assert len(sharing) > 100 and len(disjoint) > 100
    assert np.mean(sharing) > np.mean(disjoint) + 0.1


class TestCosine:
    def test_self_similarity(self):
        v = unit([0.3, -1.2, 2.0, 0.1])
        assert abs(cosine(v, v) - 1.0) < 1e-9

    def test_orthogonal(self):
        assert cosine(np.eye(4)[0], np.eye(4)[1]) == 0.0

    def test_known_angle(self):
        assert abs(cosine(unit([1, 1, 0]), unit([1, 0, 0])) - 0.70710678) < 1e-8

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            cosine(np.ones(3), np.ones(4))

    @given(st.lists(st.floats(-10, 10), min_size=3, max_size=3),
           st.lists(st.floats(-10, 10), min_size=3, max_size=3))
    def test_symmetric_and_bounded(self, a, b):
        a, b = np.array(a), np.array(b)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroVectorWarning)
            ab, ba = cosine(a, b), cosine(b, a)
        assert ab == ba
        assert abs(ab) <= 1 + 1e-12


class TestCentroid:
    def test_singleton(self):
        v = unit([1, 2, 3])
        assert np.array_equal(centroid([v]), v)

    def test_two_one_hots(self):
        e = np.eye(4)
        assert np.array_equal(centroid([e[0], e[1]]), [0.5, 0.5, 0, 0])

    def test_repeats(self):
        v = unit([0.2, -0.7, 0.4])
        assert np.allclose(centroid([v] * 7), v, atol=1e-15)

    def test_empty(self):
        with pytest.raises(ValueError):
            centroid([])


def test_spec_validation():
    with pytest.raises(ValueError):
        EmbedderSpec("word2vec")
    with pytest.raises(ValueError):
        EmbedderSpec(dim=1)
    assert EmbedderSpec(dim=64).same_model(EmbedderSpec(dim=64))
    assert not EmbedderSpec(dim=64).same_model(EmbedderSpec(dim=64, ngram=4))


def test_transformer_missing_artifact(tmp_path):
    with pytest.raises(EmbeddingError, match="not found"):
        get_embedder(EmbedderSpec("transformer-artifact", dim=8, model_path=str(tmp_path / "x")))


@pytest.fixture(scope="module")
def tiny_model_dir(tmp_path_factory):
    pytest.importorskip("torch")
    transformers = pytest.importorskip("transformers")
    path = tmp_path_factory.mktemp("tiny-bert")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "tab", "##ak", "fisch", "##zucht",
             "handel", "wind", "##park"]
    (path / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")
    tok = transformers.BertTokenizerFast(str(path / "vocab.txt"), do_lower_case=True)
    tok.save_pretrained(str(path))
    import torch

    torch.manual_seed(0)
    config = transformers.BertConfig(vocab_size=len(vocab), hidden_size=16, num_hidden_layers=1,
                                     num_attention_heads=2, intermediate_size=32)
    transformers.BertModel(config).save_pretrained(str(path))
    return path


def test_transformer_backend_mean_pools(tiny_model_dir):
    import torch
    import transformers

    spec = EmbedderSpec("transformer-artifact", dim=16, model_path=str(tiny_model_dir))
    vecs = get_embedder(spec).embed_many(["tabak", "fischzucht", "windpark"])
    assert all(abs(np.linalg.norm(v) - 1.0) < 1e-9 for v in vecs)

    tok = transformers.AutoTokenizer.from_pretrained(str(tiny_model_dir))
    model = transformers.AutoModel.from_pretrained(str(tiny_model_dir)).eval()
    with torch.no_grad():
        hidden = model(**tok(["fischzucht"], return_tensors="pt")).last_hidden_state[0]
    expected = hidden.double().numpy().mean(axis=0)
    assert np.allclose(vecs[1], expected / np.linalg.norm(expected), atol=1e-6)
    assert embed_term(spec, "tabak").tobytes() == vecs[0].tobytes()


def test_transformer_dimension_mismatch(tiny_model_dir):
    spec = EmbedderSpec("transformer-artifact", dim=32, model_path=str(tiny_model_dir))
    with pytest.raises(EmbeddingError, match="16-dim"):
        get_embedder(spec)


def test_transformer_path_from_environment(tiny_model_dir, monkeypatch):
    monkeypatch.setenv("CLASSKW_MODEL_PATH", str(tiny_model_dir))
    from classkw.embedding import TransformerEmbedder

    emb = TransformerEmbedder(EmbedderSpec("transformer-artifact", dim=16))
    assert math.isclose(float(np.linalg.norm(emb.embed("handel"))), 1.0)
