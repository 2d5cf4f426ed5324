"""Command-line interface: ingest, index, ask, eval, benchgen.

A JSON config file supplies backend and pipeline settings; flags override
config values. Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import datagen, evaluation, retriever
from .errors import HopragError
from .gateway import HttpBackend, ScriptedBackend, ScriptedOracle
from .pipeline import AblationFlags, PipelineConfig, QAEngine
from .retriever import RetrievalConfig

ABLATION_FLAGS = (
    "relevance_filter_enabled",
    "ending_check_enabled",
    "refiner_enabled",
)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise HopragError("config file must hold a JSON object")
    return config


def _build_backend(config: dict, args, corpus):
    backend_cfg = dict(config.get("backend", {}))
    if getattr(args, "backend", None):
        backend_cfg["type"] = args.backend
    if getattr(args, "oracle", None):
        backend_cfg["oracle_path"] = args.oracle
    backend_type = backend_cfg.get("type", "scripted")
    if backend_type == "scripted":
        oracle_path = backend_cfg.get("oracle_path")
        if not oracle_path:
            raise HopragError("scripted backend needs an oracle file (--oracle)")
        return ScriptedBackend(ScriptedOracle.from_jsonl(oracle_path), corpus)
    if backend_type == "http":
        return HttpBackend(
            endpoint_url=backend_cfg["endpoint_url"],
            model_name=backend_cfg.get("model_name", "default"),
            api_key_env=backend_cfg.get("api_key_env"),
            max_parallel=int(backend_cfg.get("max_parallel", 4)),
        )
    raise HopragError(f"unknown backend type: {backend_type!r}")


def _pipeline_config(config: dict, args) -> PipelineConfig:
    retrieval = RetrievalConfig(**config.get("retrieval", {}))
    pipeline_cfg = dict(config.get("pipeline", {}))
    ablation = AblationFlags(**pipeline_cfg.pop("ablation", {}))
    for flag in getattr(args, "ablate", None) or []:
        if flag not in ABLATION_FLAGS:
            raise HopragError(
                f"unknown ablation flag {flag!r}; choose from {ABLATION_FLAGS}"
            )
        setattr(ablation, flag, False)
    return PipelineConfig(retrieval=retrieval, ablation=ablation, **pipeline_cfg)


def _load_corpus(path: str) -> corpus_mod.Corpus:
    p = Path(path)
    if not p.exists():
        raise HopragError(f"corpus file not found: {path}")
    fmt = "tsv" if p.suffix == ".tsv" else "jsonl"
    return corpus_mod.ingest(p, fmt)


def cmd_ingest(args) -> int:
    corpus = corpus_mod.ingest(args.input, args.format)
    corpus.save(args.out)
    print(f"ingested {corpus.doc_count} passages -> {args.out}")
    return 0


def cmd_index(args) -> int:
    corpus = _load_corpus(args.corpus)
    index = retriever.build_index(corpus)
    retriever.save_index(index, args.out)
    print(f"indexed {index.doc_count} passages, {len(index.postings)} terms -> {args.out}")
    return 0


def cmd_ask(args) -> int:
    config = _load_config(args.config)
    corpus = _load_corpus(args.corpus)
    backend = _build_backend(config, args, corpus)
    engine = QAEngine(corpus, backend, _pipeline_config(config, args))
    result = engine.answer(args.question)
    if args.trace:
        print(json.dumps(result.to_dict(args.question), ensure_ascii=False, indent=2))
    else:
        print(f"answer: {result.answer}")
        print(f"class: {result.query_class.value}")
        print(f"steps: {result.steps}")
    return 0


def cmd_eval(args) -> int:
    config = _load_config(args.config)
    if not Path(args.dataset).exists():
        raise HopragError(f"dataset file not found: {args.dataset}")
    examples = evaluation.load_dataset(args.dataset)
    corpus = _load_corpus(args.corpus)
    backend = _build_backend(config, args, corpus)
    engine = QAEngine(corpus, backend, _pipeline_config(config, args))
    report = evaluation.evaluate(
        examples, engine, max_workers=int(config.get("eval", {}).get("concurrency", 4))
    )
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2, sort_keys=True)
    print(report.table())
    return 0


def cmd_benchgen(args) -> int:
    config = _load_config(args.config)
    corpus = _load_corpus(args.corpus)
    backend = _build_backend(config, args, corpus)
    summary = datagen.build_benchmark(
        corpus,
        counts={"train": args.train, "dev": args.dev, "test": args.test},
        rng_seed=args.seed,
        backend=backend,
        out_dir=args.out_dir,
    )
    print(
        f"emitted {summary.emitted} "
        f"(qa rejections {summary.qa_rejections}, compose rejections {summary.compose_rejections})"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hoprag",
        description="Adaptive multi-hop retrieval-augmented question answering.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest a record stream into a corpus snapshot")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=corpus_mod.FORMATS, default="jsonl")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="build and save a BM25 index")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("ask", help="answer one question")
    p.add_argument("question")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config")
    p.add_argument("--backend", choices=("scripted", "http"))
    p.add_argument("--oracle", help="scripted oracle JSONL file")
    p.add_argument("--ablate", action="append", metavar="FLAG")
    p.add_argument("--trace", action="store_true", help="print the full trace JSON")
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("eval", help="run a batch evaluation")
    p.add_argument("--dataset", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--config")
    p.add_argument("--backend", choices=("scripted", "http"))
    p.add_argument("--oracle")
    p.add_argument("--ablate", action="append", metavar="FLAG")
    p.add_argument("--report", help="write the full JSON report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("benchgen", help="synthesize a compound benchmark")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config")
    p.add_argument("--backend", choices=("scripted", "http"))
    p.add_argument("--oracle")
    p.add_argument("--train", type=int, required=True)
    p.add_argument("--dev", type=int, required=True)
    p.add_argument("--test", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_benchgen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except HopragError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
