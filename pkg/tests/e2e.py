"""The prepare-seeds -> extract -> evaluate chain over the bundled fixture.

``python tests/e2e.py`` refreshes tests/golden/ after an intentional change;
the golden files are then re-checked against the brute-force oracles by the
test suite.
"""

from __future__ import annotations

import json
import shutil
import sys
import tempfile
from pathlib import Path

HERE = Path(__file__).parent
FIXTURES = HERE.parent / "src" / "classkw" / "data" / "synthetic"
GOLDEN = HERE / "golden"

# files compared byte for byte; manifests carry timestamps and are excluded
OUTPUTS = ("seeds.json", "gold.json", "results.json", "report.json", "report.txt",
           "report.tsv")
RNG_SEED = 42


def run_chain(outdir: Path, extra_evaluate: list[str] | None = None) -> list[int]:
    from classkw.cli import main

    outdir = Path(outdir)
    codes = [
        main(["prepare-seeds", "--pool", str(FIXTURES / "gold_pool.json"),
              "--per-class", "10", "--rng-seed", str(RNG_SEED),
              "--seeds-out", str(outdir / "seeds.json"), "--gold-out", str(outdir / "gold.json")]),
        main(["extract", "--corpus", str(FIXTURES / "corpus.jsonl"),
              "--seeds", str(outdir / "seeds.json"), "--out", str(outdir / "results.json")]),
        main(["evaluate", "--results", str(outdir / "results.json"),
              "--gold", str(outdir / "gold.json"), "--corpus", str(FIXTURES / "corpus.jsonl"),
              "--lemmas", str(FIXTURES / "lemmas.tsv"), "--out", str(outdir / "report.json"),
              "--table", str(outdir / "report.txt"), "--tsv", str(outdir / "report.tsv"),
              *(extra_evaluate or [])]),
    ]
    return codes


def planted_top10() -> dict[str, list[str]]:
    """Top-10 non-seed keywords per class, computed by the oracle pipeline alone."""
    import oracles

    docs = []
    for line in (FIXTURES / "corpus.jsonl").read_text(encoding="utf-8").splitlines():
        docs.append(oracles.normalize(json.loads(line)["text"]))
    stop = set()
    stop_file = HERE.parent / "src" / "classkw" / "data" / "stopwords_de.txt"
    for line in stop_file.read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            stop.add(oracles.normalize(line.strip()))
    seeds = json.loads((GOLDEN / "seeds.json").read_text(encoding="utf-8"))
    out = {}
    for cid, raw in sorted(seeds.items()):
        norm = [oracles.normalize(s) for s in raw]
        final, history = oracles.pipeline(docs, norm, stop)
        head = len(norm) + sum(len(h) for h in history)
        out[cid] = final[head : head + 10]
    return out


def regenerate() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        codes = run_chain(Path(tmp))
        if codes != [0, 0, 0]:
            raise SystemExit(f"chain failed: {codes}")
        GOLDEN.mkdir(exist_ok=True)
        for name in OUTPUTS:
            shutil.copyfile(Path(tmp) / name, GOLDEN / name)
    (GOLDEN / "planted_top10.json").write_text(
        json.dumps(planted_top10(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


if __name__ == "__main__":
    sys.path.insert(0, str(HERE.parent / "src"))
    sys.path.insert(0, str(HERE))
    regenerate()
