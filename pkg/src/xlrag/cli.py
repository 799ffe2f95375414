"""Operator command line: build indices, run queries, evaluate, score, report.

Backend endpoints come from a JSON config file (one entry per model
role); flags override file values and the api_key can be overridden via
XLRAG_<ROLE>_API_KEY or XLRAG_API_KEY. ``--mock`` swaps every backend
for the deterministic in-process mocks, which is what demos and CI use.

Exit codes: 0 success (including runs with per-query failures, which
are reported as a warning count), 2 configuration or IO problems,
3 backend exhaustion, 1 anything else. Failures print a single JSON
line to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .backends import (
    BackendConfig,
    EchoChatBackend,
    HttpChatBackend,
    HttpEmbedBackend,
    HttpRerankBackend,
    HttpTranslateBackend,
    MockEmbedBackend,
    MockJudgeBackend,
    MockRerankBackend,
    MockTranslateBackend,
)
from .core import ContextStatus, PipelineMode, Query
from .data import load_kb, load_qa, load_reports, save_report_set
from .errors import (
    BackendError,
    ConfigError,
    IngestError,
    SchemaError,
    ValidationError,
    XlragError,
)
from .index import build_index, load_index, save_index
from .langid import DetectorConfig
from .locales import register_language
from .metrics import render_table
from .pipeline import Backends, PipelineConfig, run_benchmark, run_query
from .quality import render_tag, score_translation

_ROLES = ("embedder", "reranker", "translator", "judge", "generator")
_HTTP_CLASSES = {
    "embedder": HttpEmbedBackend,
    "reranker": HttpRerankBackend,
    "translator": HttpTranslateBackend,
    "judge": HttpChatBackend,
    "generator": HttpChatBackend,
}


def _load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    for code, name in doc.get("languages", {}).items():
        register_language(code, name)
    return doc


def _api_key_for(role: str, configured: Optional[str]) -> Optional[str]:
    return (
        os.environ.get(f"XLRAG_{role.upper()}_API_KEY")
        or os.environ.get("XLRAG_API_KEY")
        or configured
    )


def _backend_config(role: str, doc: dict) -> BackendConfig:
    entry = doc.get("backends", {}).get(role)
    if entry is None:
        raise ConfigError(f"config has no backend entry for role {role!r} (use --mock for demos)")
    try:
        return BackendConfig(
            base_url=entry["base_url"],
            model_name=entry["model_name"],
            api_key=_api_key_for(role, entry.get("api_key")),
            timeout=entry.get("timeout", 30.0),
            max_retries=entry.get("max_retries", 2),
            parallelism=entry.get("parallelism", 1),
            language_code_map=entry.get("language_code_map", {}),
        )
    except KeyError as exc:
        raise ConfigError(f"backend {role!r} config is missing {exc.args[0]!r}") from None


def _mock_backends() -> Backends:
    return Backends(
        embedder=MockEmbedBackend(),
        reranker=MockRerankBackend(),
        translator=MockTranslateBackend(),
        judge=MockJudgeBackend(),
        generator=EchoChatBackend(),
    )


def _build_backends(args, doc: dict) -> Backends:
    if args.mock:
        return _mock_backends()
    return Backends(
        **{role: _HTTP_CLASSES[role](_backend_config(role, doc)) for role in _ROLES}
    )


def _pipeline_config(args, doc: dict) -> PipelineConfig:
    section = doc.get("pipeline", {})
    detector_doc = doc.get("detector", {})
    detector = DetectorConfig(
        latin_candidates=tuple(detector_doc.get("latin_candidates", ("en", "fi")))
    )

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return section.get(key, default)

    return PipelineConfig(
        top_k=pick(getattr(args, "topk", None), "top_k", 50),
        top_n=pick(getattr(args, "topn", None), "top_n", 5),
        filter_threshold=pick(getattr(args, "threshold", None), "threshold", 3.5),
        filter_rule=pick(getattr(args, "filter_rule", None), "filter_rule", "all-below"),
        judge_max_retries=section.get("judge_max_retries", 2),
        max_tokens=section.get("max_tokens", 512),
        parallelism=pick(getattr(args, "parallelism", None), "parallelism", 1),
        translate_max_chars=section.get("translate_max_chars"),
        detector=detector,
    )


def cmd_index_build(args) -> int:
    doc = _load_config_file(args.config)
    if args.mock:
        embedder = MockEmbedBackend()
    else:
        embedder = HttpEmbedBackend(_backend_config("embedder", doc))
    passages = load_kb(args.kb)
    index = build_index(passages, embedder, batch_size=args.batch_size)
    save_index(index, args.out)
    print(f"indexed {len(index)} passages (dimension {index.dimension}) -> {args.out}")
    return 0


def _format_scores(cp) -> str:
    if cp.scores is None:
        return ""
    return " scores=" + "/".join(f"{v:.1f}" for v in cp.scores.as_tuple())


def cmd_run(args) -> int:
    doc = _load_config_file(args.config)
    backends = _build_backends(args, doc)
    config = _pipeline_config(args, doc)
    index = load_index(args.index)
    query = Query(id="cli", text=args.question, lang=args.lang)
    trace = run_query(query, PipelineMode(args.mode), config, backends, index)

    print(f"query: {query.text}")
    print(f"mode: {trace.mode.value}  lang: {query.lang}")
    print("context:")
    for cp in trace.context:
        marker = "-" if cp.status is ContextStatus.FILTERED_OUT else "*"
        print(f"  {marker} {cp.source.id} [{cp.status.value}]{_format_scores(cp)}")
    print("answer:")
    print(trace.answer)
    if trace.warnings:
        print(f"warnings ({len(trace.warnings)}):")
        for warning in trace.warnings:
            print(f"  - {warning}")
    return 0


def cmd_eval(args) -> int:
    doc = _load_config_file(args.config)
    backends = _build_backends(args, doc)
    config = _pipeline_config(args, doc)
    index = load_index(args.index)
    records = load_qa(args.qa, args.lang)

    reports = [
        run_benchmark(records, PipelineMode(mode), config, backends, index)
        for mode in args.mode
    ]
    print(render_table(reports))
    failed = sum(report.manifest.get("failed_records", 0) for report in reports)
    if failed:
        print(f"warnings: {failed} failed queries across all modes")
    if args.out:
        save_report_set(args.out, reports)
        print(f"report written to {args.out}")
    return 0


def cmd_score(args) -> int:
    doc = _load_config_file(args.config)
    judge = MockJudgeBackend() if args.mock else HttpChatBackend(_backend_config("judge", doc))
    outcome = score_translation(args.original, args.translated, args.lang, judge)
    if outcome.scores is None:
        raise BackendError(f"scoring failed: {outcome.failure}", attempts=outcome.attempts)
    scores = outcome.scores
    print(f"semantic_equivalence: {scores.semantic_equivalence:.1f}")
    print(f"grammatical_accuracy: {scores.grammatical_accuracy:.1f}")
    print(f"naturalness_fluency: {scores.naturalness_fluency:.1f}")
    print(f"tag:{render_tag(scores, args.lang)}")
    return 0


def cmd_report(args) -> int:
    reports = []
    for path in args.paths:
        reports.extend(load_reports(path))
    print(render_table(reports))
    return 0


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file with backend endpoints")
    parser.add_argument("--mock", action="store_true", help="use deterministic mock backends")


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--topk", type=int, default=None, help="initial retrieval depth (default 50)")
    parser.add_argument("--topn", type=int, default=None, help="rerank depth (default 5)")
    parser.add_argument("--threshold", type=float, default=None, help="hard-filter threshold (default 3.5)")
    parser.add_argument(
        "--filter-rule",
        choices=["all-below", "any-below"],
        default=None,
        help="hard-filter exclusion rule (default all-below)",
    )
    parser.add_argument("--parallelism", type=int, default=None, help="worker pool size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xlrag",
        description="Cross-lingual RAG with translation quality tagging",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    index_parser = sub.add_parser("index", help="index management")
    index_sub = index_parser.add_subparsers(dest="index_command", required=True)
    build_parser_ = index_sub.add_parser("build", help="build an index from a passage JSONL file")
    build_parser_.add_argument("kb", help="knowledge-base JSONL file")
    build_parser_.add_argument("--out", required=True, help="output index directory")
    build_parser_.add_argument("--batch-size", type=int, default=64)
    _add_common_flags(build_parser_)
    build_parser_.set_defaults(func=cmd_index_build)

    run_parser = sub.add_parser("run", help="answer a single question")
    run_parser.add_argument("question")
    run_parser.add_argument("--lang", required=True, help="query language code")
    run_parser.add_argument(
        "--mode", choices=[m.value for m in PipelineMode], default=PipelineMode.QTT.value
    )
    run_parser.add_argument("--index", required=True, help="index directory")
    _add_common_flags(run_parser)
    _add_pipeline_flags(run_parser)
    run_parser.set_defaults(func=cmd_run)

    eval_parser = sub.add_parser("eval", help="run a QA benchmark over one or more modes")
    eval_parser.add_argument("qa", help="benchmark JSONL file")
    eval_parser.add_argument("--lang", required=True)
    eval_parser.add_argument(
        "--mode",
        nargs="+",
        choices=[m.value for m in PipelineMode],
        default=[m.value for m in PipelineMode],
    )
    eval_parser.add_argument("--index", required=True)
    eval_parser.add_argument("--out", help="write a report-set JSON file")
    _add_common_flags(eval_parser)
    _add_pipeline_flags(eval_parser)
    eval_parser.set_defaults(func=cmd_eval)

    score_parser = sub.add_parser("score", help="score one translation pair")
    score_parser.add_argument("original")
    score_parser.add_argument("translated")
    score_parser.add_argument("--lang", required=True)
    _add_common_flags(score_parser)
    score_parser.set_defaults(func=cmd_score)

    report_parser = sub.add_parser("report", help="render saved reports as a comparison table")
    report_parser.add_argument("paths", nargs="+")
    report_parser.set_defaults(func=cmd_report)

    return parser


def _fail(kind: str, exc: Exception) -> None:
    print(json.dumps({"error": kind, "message": str(exc)}, ensure_ascii=False), file=sys.stderr)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, IngestError, SchemaError, ValidationError, OSError) as exc:
        _fail("config", exc)
        return 2
    except BackendError as exc:
        _fail("backend", exc)
        return 3
    except XlragError as exc:
        _fail("internal", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
