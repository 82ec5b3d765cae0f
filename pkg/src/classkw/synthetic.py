"""Deterministic three-class synthetic corpus with planted vocabulary clusters.

Each class owns a family of German compounds built around shared stems
(``zucht``, ``kraftwerk``, ``handel`` ...), so the character n-gram embedder
sees the clusters.  Documents are business-purpose style sentences mixing one
class's terms with generic filler vocabulary.  Some gold keywords never occur
in the corpus, some occur only in an inflected form, and some pool entries are
multi-word phrases, so gold filtering, lemma matching and keyphrase truncation
all have something to do.

Run ``python -m classkw.synthetic OUTDIR`` to regenerate the bundled files.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

CLASSES = {
    "A": {
        "label": "Land- und Forstwirtschaft, Fischerei",
        "planted": [
            "Schweinezucht", "Rinderzucht", "Pferdezucht", "Austernzucht", "Fischzucht",
            "Bienenzucht", "Geflügelzucht", "Schafzucht", "Ziegenzucht", "Muschelzucht",
            "Schweinehaltung", "Rinderhaltung", "Geflügelhaltung", "Schafhaltung",
            "Ziegenhaltung", "Tierhaltung", "Hochseefischerei", "Küstenfischerei",
            "Binnenfischerei", "Teichfischerei", "Fischerei", "Forstzucht",
        ],
        "phrases": ["Schweinezucht und -haltung", "Fischzucht in Teichen",
                    "Austernzucht an der Küste"],
        "absent": ["Seidenraupenzucht", "Kaninchenzucht", "Hummerfischerei"],
        "inflected": {"Fischzuchten": "fischzucht", "Schafzuchten": "schafzucht"},
    },
    "D": {
        "label": "Energieversorgung",
        "planted": [
            "Heizkraftwerk", "Kohlekraftwerk", "Windkraftwerk", "Solarkraftwerk",
            "Wasserkraftwerk", "Blockheizkraftwerk", "Gaskraftwerk", "Stromerzeugung",
            "Energieerzeugung", "Wärmeerzeugung", "Gaserzeugung", "Solarstromerzeugung",
            "Energieversorgung", "Wärmeversorgung", "Gasversorgung", "Stromversorgung",
            "Windenergie", "Solarenergie", "Bioenergie", "Energieanlagen",
            "Windpark", "Solarpark",
        ],
        "phrases": ["Windpark auf See", "Energieversorgung der Region",
                    "Stromerzeugung aus Wind"],
        "absent": ["Spaltgaserzeugung", "Kokereigasgewinnung", "Fernwärmenetz"],
        "inflected": {"Windparks": "windpark", "Heizkraftwerke": "heizkraftwerk"},
    },
    "G": {
        "label": "Handel",
        "planted": [
            "Grosshandel", "Einzelhandel", "Weinhandel", "Autohandel", "Onlinehandel",
            "Versandhandel", "Textilhandel", "Möbelhandel", "Buchhandel", "Kunsthandel",
            "Warenhandel", "Lebensmittelhandel", "Elektrohandel", "Baustoffhandel",
            "Getränkehandel", "Importhandel", "Exporthandel", "Handelsvertretung",
            "Handelsvermittlung", "Handelsgeschäft", "Fahrzeughandel", "Spielwarenhandel",
        ],
        "phrases": ["Einzelhandel mit Waren", "Grosshandel von Textilien",
                    "Handelsvertretung für Maschinen"],
        "absent": ["Zeitschriftenhandel", "Tabakwarenhandel", "Briefmarkenhandel"],
        "inflected": {"Handelsgeschäfte": "handelsgeschaeft", "Weinhandels": "weinhandel"},
    },
}

FILLER = [
    "Gesellschaft", "Beteiligung", "Verwaltung", "Geschäftsführung", "Unternehmen",
    "Gegenstand", "Erbringung", "Dienstleistungen", "Beratung", "Vermietung",
    "Immobilien", "Software", "Entwicklung", "Tätigkeiten", "Erwerb", "Halten",
    "Durchführung", "Verwertung", "Projekte", "Planung", "Organisation", "Vertrieb",
    "Betrieb", "Kapital", "Komplementärin", "Stammkapital", "Gründung", "Sitz",
]
STOP = ["und", "der", "die", "das", "von", "mit", "sowie", "im", "des", "für",
        "insbesondere", "aller", "Art"]
TEMPLATES = [
    "Gegenstand des Unternehmens ist {terms} sowie {filler}.",
    "Die Gesellschaft betreibt {terms} und {filler}.",
    "{filler}: {terms}, insbesondere im Bereich {extra}.",
    "Gegenstand ist die {filler} von {terms} aller Art.",
]

N_DOCS = 150
SEED = 20240917


def _join(words: list[str]) -> str:
    if len(words) == 1:
        return words[0]
    return ", ".join(words[:-1]) + " und " + words[-1]


def generate(n_docs: int = N_DOCS, seed: int = SEED) -> tuple[list[dict], dict, list[tuple]]:
    """Return ``(corpus records, gold pool, lemma table rows)``."""
    rng = random.Random(seed)
    class_ids = sorted(CLASSES)
    records = []
    for i in range(n_docs):
        cls = CLASSES[class_ids[i % len(class_ids)]]
        vocab = cls["planted"] + list(cls["inflected"])
        terms = rng.sample(vocab, rng.randint(2, 4))
        filler = rng.sample(FILLER, rng.randint(2, 4))
        extra = rng.choice(cls["planted"])
        template = rng.choice(TEMPLATES)
        text = template.format(terms=_join(terms), filler=_join(filler), extra=extra)
        if rng.random() < 0.3:
            text += f" Stammkapital {rng.randint(1, 500) * 100} EUR."
        records.append({"id": f"doc-{i:04d}", "text": text})

    pool = {}
    for cid in class_ids:
        cls = CLASSES[cid]
        pool[cid] = cls["planted"] + cls["phrases"] + cls["absent"]
    lemmas = []
    for cid in class_ids:
        for surface, lemma in CLASSES[cid]["inflected"].items():
            lemmas.append((surface, lemma))
    return records, pool, lemmas


def write(outdir: str | Path, n_docs: int = N_DOCS, seed: int = SEED) -> None:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    records, pool, lemmas = generate(n_docs, seed)
    with (outdir / "corpus.jsonl").open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
    (outdir / "gold_pool.json").write_text(
        json.dumps(pool, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    with (outdir / "lemmas.tsv").open("w", encoding="utf-8") as fh:
        for surface, lemma in lemmas:
            fh.write(f"{surface}\t{lemma}\n")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m classkw.synthetic OUTDIR", file=sys.stderr)
        return 2
    write(argv[0])
    return 0


if __name__ == "__main__":
    sys.exit(main())
