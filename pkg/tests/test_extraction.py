import random

import pytest

import oracles
from classkw.corpus import Batch, Document, SeedSet
from classkw.embedding import EmbedderSpec, get_embedder
from classkw.extraction import extract_batch, guided_extract, guidance_vector

SEEDS = SeedSet("A", ["fischzucht", "schweinezucht"])


def test_near_duplicate_of_seed_is_found(embedder):
    doc = Document("d", "die fischzuchten")
    out = guided_extract(doc, SEEDS, embedder, stopwords={"die"})
    assert [c.term for c in out] == ["fischzuchten"]
    center = [sum(c) / 2 for c in zip(*(oracles.hash_vector(s, 64) for s in SEEDS.terms))]
    expected = oracles.cos(oracles.hash_vector("fischzuchten", 64), center)
    assert out[0].seed_similarity > 0
    assert abs(out[0].seed_similarity - expected) < 1e-12
    assert out[0].source_doc == "d"


def test_no_candidates(embedder):
    assert guided_extract(Document("d", "und mit der"), SEEDS, embedder,
                          stopwords={"und", "mit", "der"}) == []


def test_surrounding_text_has_no_influence(embedder):
    a = Document("a", "rinderzucht und handel. gegenstand: rinderzucht, handel!")
    b = Document("b", "handel rinderzucht")
    ea = guided_extract(a, SEEDS, embedder, stopwords={"und", "gegenstand"})
    eb = guided_extract(b, SEEDS, embedder)
    assert [(c.term, c.seed_similarity) for c in ea] == [(c.term, c.seed_similarity) for c in eb]


def test_seeds_are_excluded(embedder):
    seeds = SeedSet("A", ["fischzucht"], ["rinderzucht"])
    out = guided_extract(Document("d", "fischzucht rinderzucht pferdezucht"), seeds, embedder)
    assert [c.term for c in out] == ["pferdezucht"]


def test_top_n_cut_and_ordering(embedder):
    doc = Document("d", "pferdezucht rinderzucht handel tabak software beratung immobilien")
    out = guided_extract(doc, SEEDS, embedder, top_n=3)
    assert len(out) == 3
    sims = [c.seed_similarity for c in out]
    assert sims == sorted(sims, reverse=True)
    full = guided_extract(doc, SEEDS, embedder, top_n=100)
    assert out == full[:3]


def test_empty_seed_set(embedder):
    with pytest.raises(ValueError):
        guided_extract(Document("d", "tabak"), SeedSet("A", []), embedder)


def test_blend_weight_brings_document_in(embedder):
    doc = Document("d", "tabak handel fischerei")
    q1 = guidance_vector(SEEDS, embedder, doc, 1.0)
    q0 = guidance_vector(SEEDS, embedder, doc, 0.0)
    assert (q1 == guidance_vector(SEEDS, embedder)).all()
    assert (q0 == embedder.embed(doc.text)).all()


def test_batch_dedup(embedder):
    batch = Batch(0, (Document("1", "zucht"), Document("2", "zucht und zucht")))
    assert extract_batch(batch, SEEDS, embedder, stopwords={"und"}) == {"zucht"}


def test_batch_of_one(embedder):
    doc = Document("1", "pferdezucht handel tabak")
    terms = {c.term for c in guided_extract(doc, SEEDS, embedder, top_n=2)}
    assert extract_batch(Batch(0, (doc,)), SEEDS, embedder, top_n=2) == terms


def test_planted_batch_against_oracle():
    """Four documents with planted in-class terms among filler: the per-document
    top-3 cut keeps exactly the planted terms, as brute force confirms."""
    spec = EmbedderSpec(dim=256)
    emb = get_embedder(spec)
    seeds = SeedSet("A", ["schweinezucht", "fischzucht", "austernzucht"])
    planted = [["rinderzucht", "pferdezucht", "bienenzucht"],
               ["ziegenzucht", "schafzucht", "muschelzucht"],
               ["pferdezucht", "gefluegelzucht", "rinderzucht"],
               ["fischzuchten", "schafzucht", "bienenzucht"]]
    filler = ["beratung", "software", "immobilien", "vermietung", "projekte", "verwaltung"]
    rng = random.Random(4)
    docs = []
    for i, terms in enumerate(planted):
        words = terms + rng.sample(filler, 4)
        rng.shuffle(words)
        docs.append(Document(str(i), " ".join(words)))
    center = [sum(c) / 3 for c in zip(*(oracles.hash_vector(s, 256) for s in seeds.terms))]
    expected = set()
    for doc in docs:
        sims = [(t, oracles.cos(oracles.hash_vector(t, 256), center))
                for t in oracles.candidates(doc.text, set())]
        expected.update(oracles.order(sims)[:3])
    assert expected == {t for terms in planted for t in terms}
    got = extract_batch(Batch(0, tuple(docs)), seeds, emb, top_n=3)
    assert got == expected
    assert extract_batch(Batch(0, tuple(docs)), seeds, emb, top_n=3, jobs=4) == expected
