"""Command line entry points: ``prepare-seeds``, ``extract`` and ``evaluate``.

Exit status is 0 on success, 1 on runtime failure and 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import platform
import sys
from dataclasses import fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .corpus import (
    CorpusError,
    corpus_vocabulary,
    gold_sets_from_mapping,
    load_corpus,
    load_keyword_file,
    prepare_seeds,
    seed_sets_from_mapping,
)
from .embedding import BACKENDS, HASH_NGRAM, MODEL_PATH_ENV, TRANSFORMER, EmbedderSpec
from .evaluation import DEFAULT_KS, METHODS, evaluate_all, load_lemma_table
from .pipeline import (
    SEED_HEAD_ALL,
    SEED_HEAD_ORIGINAL,
    PipelineConfig,
    dump_json,
    load_results,
    run_pipeline,
    write_results,
)

log = logging.getLogger("classkw")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

DEFAULT_EVAL_EMBEDDER = EmbedderSpec(HASH_NGRAM, dim=512, ngram=4)

_EMBEDDER_KEYS = {"embedder": "backend", "dim": "dim", "ngram": "ngram", "model_path": "model_path"}
_CONFIG_FIELDS = {f.name for f in fields(PipelineConfig)} - {"embedder"}


class CLIError(RuntimeError):
    pass


def existing_file(value: str) -> Path:
    path = Path(value)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"file not found: {value}")
    return path


def positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def ks_list(value: str) -> list[int]:
    try:
        ks = [int(v) for v in value.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid K list: {value!r}") from None
    if not ks or any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError(f"invalid K list: {value!r}")
    return ks


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _coerce(key: str, value: Any) -> Any:
    if not isinstance(value, str):
        return value
    if key in ("n_iterations", "number_newseed", "topk", "top_n_per_doc", "min_len", "dim",
               "ngram", "shuffle_seed"):
        return None if value.lower() in ("", "none", "null") else int(value)
    if key in ("percentile_newseed", "seed_weight"):
        return float(value)
    if key == "transliterate":
        return value.strip().lower() in ("1", "true", "yes", "on")
    if key in ("stopwords", "model_path") and value.lower() in ("", "none", "null"):
        return None
    return value


def read_config_file(path: str | Path) -> dict[str, Any]:
    """JSON object or ``key = value`` lines; keys may use dashes or underscores."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        raw = json.loads(text)
        if isinstance(raw.get("embedder"), dict):
            emb = raw.pop("embedder")
            raw.update({k if k != "backend" else "embedder": v for k, v in emb.items()})
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CLIError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()
    out = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key not in _CONFIG_FIELDS and key not in _EMBEDDER_KEYS:
            raise CLIError(f"{path}: unknown config key {key!r}")
        out[key] = _coerce(key, value)
    return out


def build_config(args: argparse.Namespace) -> PipelineConfig:
    """Defaults, then the config file, then explicit flags."""
    settings: dict[str, Any] = {}
    if args.config is not None:
        settings.update(read_config_file(args.config))
    for key in [*_CONFIG_FIELDS, *_EMBEDDER_KEYS]:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    emb = {_EMBEDDER_KEYS[k]: settings.pop(k) for k in list(settings) if k in _EMBEDDER_KEYS}
    if emb.get("backend") == TRANSFORMER and not emb.get("model_path"):
        emb["model_path"] = os.environ.get(MODEL_PATH_ENV)
    if emb:
        settings["embedder"] = EmbedderSpec(**emb)
    if settings.get("stopwords") is not None:
        settings["stopwords"] = str(settings["stopwords"])
    return PipelineConfig(**settings)


class Manifest:
    """Run record written before any output, then finalized on completion."""

    def __init__(self, path: Path, command: str, config: dict, inputs: dict[str, Path],
                 rng_seeds: dict):
        self.path = path
        self.data = {
            "tool": "classkw",
            "version": __version__,
            "command": command,
            "config": config,
            "inputs": {
                name: {"path": str(p), "sha256": sha256_file(p)}
                for name, p in sorted(inputs.items())
                if p is not None
            },
            "rng_seeds": rng_seeds,
            "environment": {
                "python": platform.python_version(),
                "numpy": np.__version__,
            },
            "outputs": {},
            "status": "running",
            "started_at": _now(),
            "finished_at": None,
        }
        dump_json(self.data, self.path)

    def finish(self, outputs: dict[str, Path | None], status: str = "complete") -> None:
        self.data["outputs"] = {
            name: {"path": str(p), "sha256": sha256_file(p)}
            for name, p in sorted(outputs.items())
            if p is not None and Path(p).is_file()
        }
        self.data["status"] = status
        self.data["finished_at"] = _now()
        dump_json(self.data, self.path)


def default_manifest_path(out: Path) -> Path:
    return out.with_name(out.stem + ".manifest.json")


def cmd_prepare_seeds(args: argparse.Namespace) -> int:
    pool = load_keyword_file(args.pool)
    manifest = Manifest(
        args.manifest or default_manifest_path(args.seeds_out),
        "prepare-seeds",
        {"per_class": args.per_class, "transliterate": not args.no_transliterate},
        {"pool": args.pool},
        {"rng_seed": args.rng_seed},
    )
    try:
        seeds, gold = prepare_seeds(pool, args.per_class, args.rng_seed, not args.no_transliterate)
    except CorpusError:
        manifest.finish({}, "failed")
        raise
    dump_json(seeds, args.seeds_out)
    dump_json(gold, args.gold_out)
    manifest.finish({"seeds": args.seeds_out, "gold": args.gold_out})
    log.info("wrote %d classes to %s and %s", len(seeds), args.seeds_out, args.gold_out)
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    config = build_config(args)
    corpus = load_corpus(args.corpus, config.transliterate)
    class_seeds = seed_sets_from_mapping(load_keyword_file(args.seeds), config.transliterate)
    manifest = Manifest(
        args.manifest or default_manifest_path(args.out),
        "extract",
        config.to_dict(),
        {
            "corpus": args.corpus,
            "seeds": args.seeds,
            "config": args.config,
            "stopwords": Path(config.stopwords) if config.stopwords else None,
        },
        {"shuffle_seed": config.shuffle_seed},
    )
    try:
        results = run_pipeline(corpus, class_seeds, config, jobs=args.jobs)
    except Exception:
        manifest.finish({}, "failed")
        raise
    write_results(results, args.out)
    manifest.finish({"results": args.out})
    log.info("wrote keywords for %d classes to %s", len(results), args.out)
    return EXIT_OK


def _extraction_spec(args: argparse.Namespace) -> EmbedderSpec | None:
    path = args.extraction_manifest
    if path is None:
        candidate = default_manifest_path(args.results)
        path = candidate if candidate.is_file() else None
    if path is None:
        log.warning("no extraction manifest found; cannot verify the evaluation embedder differs")
        return None
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    emb = data.get("config", {}).get("embedder")
    return EmbedderSpec(**emb) if emb else None


def cmd_evaluate(args: argparse.Namespace) -> int:
    transliterate = not args.no_transliterate
    results = load_results(args.results)
    gold = gold_sets_from_mapping(load_keyword_file(args.gold), transliterate)
    corpus = load_corpus(args.corpus, transliterate)
    lemmatizer = load_lemma_table(args.lemmas, transliterate) if args.lemmas else None
    model_path = args.eval_model_path
    if args.eval_embedder == TRANSFORMER and not model_path:
        model_path = os.environ.get(MODEL_PATH_ENV)
    eval_spec = EmbedderSpec(args.eval_embedder, args.eval_dim, args.eval_ngram, model_path)
    extraction_spec = _extraction_spec(args)
    manifest = Manifest(
        args.manifest or default_manifest_path(args.out),
        "evaluate",
        {
            "ks": args.ks,
            "exclude_seeds": args.exclude_seeds,
            "eval_embedder": json.loads(eval_spec.fingerprint()),
            "allow_same_embedder": args.allow_same_embedder,
            "transliterate": transliterate,
        },
        {"results": args.results, "gold": args.gold, "corpus": args.corpus,
         "lemmas": args.lemmas},
        {},
    )
    try:
        report = evaluate_all(
            results,
            gold,
            args.ks,
            lemmatizer,
            eval_spec,
            corpus_vocab=corpus_vocabulary(corpus),
            exclude_seeds=args.exclude_seeds,
            extraction_spec=extraction_spec,
            allow_same_embedder=args.allow_same_embedder,
        )
    except Exception:
        manifest.finish({}, "failed")
        raise
    dump_json(report.to_dict(), args.out)
    if args.table:
        Path(args.table).write_text(report.to_table(), encoding="utf-8")
    if args.tsv:
        with open(args.tsv, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
            writer.writerow(["class", "method", "k", "score"])
            for cid, method, k, value in report.rows():
                writer.writerow([cid, method, k, repr(value)])
    if args.figure:
        from .plotting import plot_report

        plot_report(report, args.figure)
    manifest.finish({"report": args.out, "table": args.table, "tsv": args.tsv,
                     "figure": args.figure})
    if args.print_table:
        sys.stdout.write(report.to_table())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="classkw", description="Class-specific keyword extraction and evaluation."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare-seeds", help="sample seed keywords and the evaluation gold set")
    p.add_argument("--pool", type=existing_file, required=True,
                   help="JSON mapping class id to its full keyword list")
    p.add_argument("--per-class", type=positive_int, default=10)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--seeds-out", type=Path, required=True)
    p.add_argument("--gold-out", type=Path, required=True)
    p.add_argument("--manifest", type=Path)
    p.add_argument("--no-transliterate", action="store_true")
    p.set_defaults(func=cmd_prepare_seeds)

    p = sub.add_parser("extract", help="run the iterative pipeline for every class")
    p.add_argument("--corpus", type=existing_file, required=True, help="JSON-lines corpus")
    p.add_argument("--seeds", type=existing_file, required=True, help="seed keyword JSON")
    p.add_argument("--out", type=Path, required=True, help="results JSON to write")
    p.add_argument("--manifest", type=Path, help="default: <out>.manifest.json")
    p.add_argument("--config", type=existing_file, help="JSON or key=value config file")
    p.add_argument("--n-iterations", dest="n_iterations", type=positive_int)
    p.add_argument("--percentile-newseed", dest="percentile_newseed", type=float)
    p.add_argument("--number-newseed", dest="number_newseed", type=int)
    p.add_argument("--topk", type=positive_int)
    p.add_argument("--top-n-per-doc", dest="top_n_per_doc", type=positive_int)
    p.add_argument("--embedder", choices=BACKENDS)
    p.add_argument("--dim", type=int)
    p.add_argument("--ngram", type=positive_int)
    p.add_argument("--model-path", dest="model_path",
                   help=f"transformer artifact directory (default: ${MODEL_PATH_ENV})")
    p.add_argument("--stopwords", type=existing_file)
    p.add_argument("--min-len", dest="min_len", type=positive_int)
    p.add_argument("--shuffle-seed", dest="shuffle_seed", type=int)
    p.add_argument("--seed-weight", dest="seed_weight", type=float)
    p.add_argument("--seed-head", dest="seed_head", choices=[SEED_HEAD_ALL, SEED_HEAD_ORIGINAL])
    p.add_argument("--no-transliterate", dest="transliterate", action="store_const", const=False)
    p.add_argument("--jobs", type=positive_int, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="precision@K of extracted keywords against a gold set")
    p.add_argument("--results", type=existing_file, required=True)
    p.add_argument("--gold", type=existing_file, required=True)
    p.add_argument("--corpus", type=existing_file, required=True,
                   help="corpus used to restrict the gold set to attested terms")
    p.add_argument("--lemmas", type=existing_file, help="surface<TAB>lemma table")
    p.add_argument("--ks", type=ks_list, default=list(DEFAULT_KS),
                   help="comma separated K values (default: 10,25,50,100)")
    p.add_argument("--out", type=Path, required=True, help="report JSON to write")
    p.add_argument("--manifest", type=Path)
    p.add_argument("--table", type=Path, help="also write an aligned text table")
    p.add_argument("--tsv", type=Path, help="also write a class/method/k/score TSV")
    p.add_argument("--figure", type=Path, help="also render a figure (png, pdf or svg)")
    p.add_argument("--print-table", action="store_true")
    p.add_argument("--exclude-seeds", action="store_true",
                   help="drop seed keywords from the lists before cutting at K")
    p.add_argument("--eval-embedder", choices=BACKENDS, default=DEFAULT_EVAL_EMBEDDER.backend)
    p.add_argument("--eval-dim", type=int, default=DEFAULT_EVAL_EMBEDDER.dim)
    p.add_argument("--eval-ngram", type=positive_int, default=DEFAULT_EVAL_EMBEDDER.ngram)
    p.add_argument("--eval-model-path")
    p.add_argument("--extraction-manifest", type=existing_file,
                   help="manifest of the extract run (default: <results>.manifest.json)")
    p.add_argument("--allow-same-embedder", action="store_true")
    p.add_argument("--no-transliterate", action="store_true")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CLIError, ValueError, OSError, RuntimeError) as exc:
        print(f"classkw {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
