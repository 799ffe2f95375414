"""Per-query orchestration of all stages and per-run benchmarking.

Mode behavior over the reranked top-n:

  base   passages pass through verbatim; no detection, no translation,
         no judge: the generator sees the corpus as retrieved
  cross  foreign passages are translated into the query language,
         untagged; in-language passages bypass untouched
  dkm    as cross, then every passage (in-language ones included) is
         rewritten by a chat call; the rewrite becomes the display text
  qtt    as cross, then translated passages are judge-scored and tagged;
         unusable judge output leaves them unscored, never fabricated
  hard   as qtt, then low-scoring translations are filtered out

Stage failures degrade per stage policy (drop the passage, keep the
query); only index or backend misconfiguration aborts a run. Per-query
failures in a benchmark are recorded as failed records with recall 0.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from time import perf_counter
from typing import Callable, Iterable, Mapping, Optional, Sequence, TypeVar

from .backends.base import ChatBackend, ChatRequest, EmbedBackend, RerankBackend, TranslateBackend
from .core import (
    ContextPassage,
    ContextStatus,
    PipelineMode,
    QARecord,
    Query,
    RetrievedPassage,
)
from .errors import BackendError, ConfigError, MetricError, ProtocolError, XlragError
from .generate import build_generation_prompt, build_no_context_prompt, generate_answer
from .index import VectorIndex, rerank, retrieve
from .langid import DetectorConfig
from .locales import fill_rewrite, resources_or_generic
from .metrics import EvalResult, RunReport, aggregate, best_recall_over_golds
from .quality import FILTER_RULE_ALL_BELOW, attach_tag, hard_filter, score_translation
from .translate import translate_if_needed

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], parallelism: int) -> list[R]:
    """Apply fn to every item, up to ``parallelism`` at a time, returning
    results in input order regardless of completion order."""
    items = list(items)
    if parallelism <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class PipelineConfig:
    top_k: int = 50
    top_n: int = 5
    filter_threshold: float = 3.5
    filter_rule: str = FILTER_RULE_ALL_BELOW
    judge_max_retries: int = 2
    max_tokens: int = 512
    parallelism: int = 1
    translate_max_chars: Optional[int] = None
    detector: DetectorConfig = field(default_factory=DetectorConfig)

    def digest(self) -> str:
        payload = {
            "top_k": self.top_k,
            "top_n": self.top_n,
            "filter_threshold": self.filter_threshold,
            "filter_rule": self.filter_rule,
            "judge_max_retries": self.judge_max_retries,
            "max_tokens": self.max_tokens,
            "translate_max_chars": self.translate_max_chars,
            "latin_candidates": list(self.detector.latin_candidates),
        }
        raw = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(raw).hexdigest()


@dataclass(frozen=True)
class Backends:
    """The five model roles behind the pipeline."""

    embedder: EmbedBackend
    reranker: RerankBackend
    translator: TranslateBackend
    judge: ChatBackend
    generator: ChatBackend

    def fingerprints(self) -> dict[str, str]:
        return {
            role: getattr(self, role).fingerprint
            for role in ("embedder", "reranker", "translator", "judge", "generator")
        }


@dataclass(frozen=True)
class PipelineTrace:
    """Full audit record for one query."""

    query: Query
    mode: PipelineMode
    retrieved: tuple[RetrievedPassage, ...]
    reranked: tuple[RetrievedPassage, ...]
    context: tuple[ContextPassage, ...]
    prompt: ChatRequest
    answer: str
    timings: Mapping[str, float]
    warnings: tuple[str, ...]
    generation_failed: bool = False

    def __post_init__(self):
        retrieved_ids = {r.passage.id for r in self.retrieved}
        if any(r.passage.id not in retrieved_ids for r in self.reranked):
            raise XlragError("reranked set contains passages absent from the retrieved set")
        visible = sum(1 for cp in self.context if cp.in_context)
        if visible > len(self.reranked):
            raise XlragError("more context passages than reranked passages")


def _base_context(reranked: Sequence[RetrievedPassage]) -> list[ContextPassage]:
    return [
        ContextPassage(
            source=item.passage,
            status=ContextStatus.ORIGINAL,
            display_text=item.passage.text,
        )
        for item in reranked
    ]


def _translate_stage(
    query: Query,
    reranked: Sequence[RetrievedPassage],
    config: PipelineConfig,
    backends: Backends,
    warnings: list[str],
) -> list[ContextPassage]:
    def translate_one(item: RetrievedPassage) -> tuple[ContextPassage, list[str]]:
        local: list[str] = []
        cp = translate_if_needed(
            item,
            query.lang,
            backends.translator,
            config.detector,
            max_chars=config.translate_max_chars,
            warnings=local,
        )
        return cp, local

    context = []
    for cp, local in parallel_map(translate_one, reranked, config.parallelism):
        warnings.extend(local)
        context.append(cp)
    return context


def _rewrite_stage(
    query: Query,
    context: Sequence[ContextPassage],
    config: PipelineConfig,
    backends: Backends,
    warnings: list[str],
) -> list[ContextPassage]:
    resources = resources_or_generic(query.lang)

    def rewrite_one(cp: ContextPassage) -> tuple[ContextPassage, list[str]]:
        if not cp.in_context:
            return cp, []
        request = ChatRequest(
            system=resources.rewrite_system,
            user=fill_rewrite(resources.rewrite_template, query.text, cp.display_text),
            max_tokens=config.max_tokens,
        )
        try:
            rewritten = backends.generator.chat_complete(request)
        except (BackendError, ProtocolError) as exc:
            return (
                replace(cp, status=ContextStatus.FILTERED_OUT),
                [f"passage {cp.source.id!r} dropped: rewrite failed: {exc}"],
            )
        return (
            ContextPassage(
                source=cp.source,
                status=ContextStatus.TRANSLATED_UNTAGGED,
                display_text=rewritten,
                translated_text=rewritten,
            ),
            [],
        )

    rewritten = []
    for cp, local in parallel_map(rewrite_one, context, config.parallelism):
        warnings.extend(local)
        rewritten.append(cp)
    return rewritten


def _score_stage(
    query: Query,
    context: Sequence[ContextPassage],
    config: PipelineConfig,
    backends: Backends,
    warnings: list[str],
) -> list[ContextPassage]:
    def score_one(cp: ContextPassage) -> tuple[ContextPassage, list[str]]:
        if cp.status is not ContextStatus.TRANSLATED_UNTAGGED:
            return cp, []
        local: list[str] = []
        try:
            outcome = score_translation(
                cp.source.text,
                cp.translated_text,
                query.lang,
                backends.judge,
                config.judge_max_retries,
            )
        except ConfigError as exc:
            local.append(f"passage {cp.source.id!r} left unscored: {exc}")
            return replace(cp, status=ContextStatus.TRANSLATED_UNSCORED), local
        if outcome.attempts > 1 and outcome.scores is not None:
            local.append(
                f"passage {cp.source.id!r}: judge needed {outcome.attempts} attempts"
            )
        if outcome.scores is None:
            local.append(f"passage {cp.source.id!r} left unscored: {outcome.failure}")
            return replace(cp, status=ContextStatus.TRANSLATED_UNSCORED), local
        return attach_tag(cp, outcome.scores, query.lang), local

    scored = []
    for cp, local in parallel_map(score_one, context, config.parallelism):
        warnings.extend(local)
        scored.append(cp)
    return scored


def _build_context(
    query: Query,
    reranked: Sequence[RetrievedPassage],
    mode: PipelineMode,
    config: PipelineConfig,
    backends: Backends,
    warnings: list[str],
) -> list[ContextPassage]:
    if mode is PipelineMode.BASE:
        return _base_context(reranked)
    context = _translate_stage(query, reranked, config, backends, warnings)
    if mode is PipelineMode.CROSS:
        return context
    if mode is PipelineMode.DKM:
        return _rewrite_stage(query, context, config, backends, warnings)
    context = _score_stage(query, context, config, backends, warnings)
    if mode is PipelineMode.HARD:
        context = hard_filter(context, config.filter_threshold, config.filter_rule)
    return context


def run_query(
    query: Query,
    mode: PipelineMode,
    config: PipelineConfig,
    backends: Backends,
    index: VectorIndex,
) -> PipelineTrace:
    """Run one query through the selected pipeline variant."""
    warnings: list[str] = []
    timings: dict[str, float] = {}

    start = perf_counter()
    retrieved = retrieve(index, query, config.top_k, backends.embedder)
    timings["retrieve"] = perf_counter() - start

    start = perf_counter()
    reranked = rerank(query, retrieved, config.top_n, backends.reranker)
    timings["rerank"] = perf_counter() - start

    start = perf_counter()
    context = _build_context(query, reranked, mode, config, backends, warnings)
    timings["context"] = perf_counter() - start

    if any(cp.in_context for cp in context):
        prompt = build_generation_prompt(query, context, mode, max_tokens=config.max_tokens)
    else:
        warnings.append("context empty after filtering; generating without background")
        prompt = build_no_context_prompt(query, mode, max_tokens=config.max_tokens)

    start = perf_counter()
    generation_failed = False
    try:
        answer = generate_answer(prompt, backends.generator)
    except (BackendError, ProtocolError) as exc:
        warnings.append(f"generation failed: {exc}")
        answer = ""
        generation_failed = True
    timings["generate"] = perf_counter() - start

    return PipelineTrace(
        query=query,
        mode=mode,
        retrieved=tuple(retrieved),
        reranked=tuple(reranked),
        context=tuple(context),
        prompt=prompt,
        answer=answer,
        timings=timings,
        warnings=tuple(warnings),
        generation_failed=generation_failed,
    )


def context_counts(traces: Iterable[Optional[PipelineTrace]]) -> tuple[int, int]:
    """(n_translated, n_input) over all non-filtered context passages."""
    n_translated = 0
    n_input = 0
    for trace in traces:
        if trace is None:
            continue
        for cp in trace.context:
            if cp.in_context:
                n_input += 1
                if cp.translated:
                    n_translated += 1
    return n_translated, n_input


def dataset_digest(records: Sequence[QARecord]) -> str:
    payload = [[r.id, r.question, r.lang, list(r.gold_answers)] for r in records]
    raw = json.dumps(payload, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(raw).hexdigest()


def build_manifest(
    records: Sequence[QARecord],
    config: PipelineConfig,
    backends: Backends,
    index: VectorIndex,
) -> dict:
    return {
        "config_hash": config.digest(),
        "backends": backends.fingerprints(),
        "dataset_hash": dataset_digest(records),
        "index_fingerprint": index.embedder_fingerprint,
        "index_size": len(index),
    }


def _run_record(
    record: QARecord,
    mode: PipelineMode,
    config: PipelineConfig,
    backends: Backends,
    index: VectorIndex,
) -> tuple[EvalResult, Optional[PipelineTrace], Optional[str]]:
    try:
        query = Query(id=record.id, text=record.question, lang=record.lang)
        trace = run_query(query, mode, config, backends, index)
    except XlragError as exc:
        return (
            EvalResult(record_id=record.id, recall=0.0, best_gold_index=-1, failed=True),
            None,
            f"record {record.id!r} failed: {exc}",
        )
    try:
        recall, gold_index = best_recall_over_golds(record.gold_answers, trace.answer.strip())
    except MetricError as exc:
        return (
            EvalResult(record_id=record.id, recall=0.0, best_gold_index=-1, failed=True),
            trace,
            f"record {record.id!r} not scorable: {exc}",
        )
    result = EvalResult(
        record_id=record.id,
        recall=recall,
        best_gold_index=gold_index,
        failed=trace.generation_failed,
    )
    return result, trace, None


def run_benchmark(
    records: Sequence[QARecord],
    mode: PipelineMode,
    config: PipelineConfig,
    backends: Backends,
    index: VectorIndex,
) -> RunReport:
    """Run every record through one mode and aggregate.

    Per-record failures never abort the run; they are recorded with
    recall 0 and the failed flag set.
    """
    if not records:
        raise MetricError("run_benchmark requires at least one record")
    outcomes = parallel_map(
        lambda record: _run_record(record, mode, config, backends, index),
        records,
        config.parallelism,
    )
    results = [result for result, _, _ in outcomes]
    n_translated, n_input = context_counts(trace for _, trace, _ in outcomes)
    manifest = build_manifest(records, config, backends, index)
    manifest["failed_records"] = sum(1 for result in results if result.failed)
    return aggregate(results, mode, n_translated, n_input, manifest)
