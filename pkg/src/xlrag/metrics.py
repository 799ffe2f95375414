"""Character 3-gram recall, cross-lingual share, and per-run aggregation.

The recall metric is deliberately language-agnostic: no script-specific
branches, no tokenization. Both strings are edge-trimmed and put into
Unicode canonical composition (NFC) so that visually identical Korean
syllables compare equal regardless of how the source encoded them.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import PipelineMode
from .errors import MetricError


def _prepare(text: str) -> str:
    return unicodedata.normalize("NFC", text.strip())


def char_trigram_recall(gold: str, prediction: str) -> float:
    """Fraction of the gold answer's distinct character trigrams found in the prediction.

    Trigrams are overlapping 3-codepoint substrings of the gold string,
    whitespace and punctuation included; duplicates count once. A gold
    shorter than 3 characters falls back to substring containment.

    Raises MetricError if the gold is empty after trimming.
    """
    gold = _prepare(gold)
    prediction = _prepare(prediction)
    if not gold:
        raise MetricError("gold answer is empty after trimming")
    if len(gold) < 3:
        return 1.0 if gold in prediction else 0.0
    trigrams = {gold[i : i + 3] for i in range(len(gold) - 2)}
    hits = sum(1 for trigram in trigrams if trigram in prediction)
    return hits / len(trigrams)


def best_recall_over_golds(golds: Sequence[str], prediction: str) -> tuple[float, int]:
    """Maximum trigram recall over several gold answers.

    Returns (recall, index of the maximizing gold); the lowest index wins
    ties. Golds that are empty after trimming are skipped; if every gold
    is empty, raises MetricError.
    """
    if not golds:
        raise MetricError("no gold answers given")
    best: Optional[tuple[float, int]] = None
    for index, gold in enumerate(golds):
        if not gold.strip():
            continue
        recall = char_trigram_recall(gold, prediction)
        if best is None or recall > best[0]:
            best = (recall, index)
    if best is None:
        raise MetricError("all gold answers are empty")
    return best


def cross_lingual_share(n_translated: int, n_input: int) -> float:
    """Fraction of context passages that required translation."""
    if n_input <= 0:
        raise MetricError(f"n_input must be positive, got {n_input}")
    if n_translated > n_input:
        raise MetricError(f"n_translated ({n_translated}) exceeds n_input ({n_input})")
    if n_translated < 0:
        raise MetricError(f"n_translated must be non-negative, got {n_translated}")
    return n_translated / n_input


@dataclass(frozen=True)
class EvalResult:
    """Per-record evaluation outcome."""

    record_id: str
    recall: float
    best_gold_index: int
    failed: bool = False

    def __post_init__(self):
        if not 0.0 <= self.recall <= 1.0:
            raise MetricError(f"recall out of [0, 1]: {self.recall}")


@dataclass(frozen=True)
class RunReport:
    """Aggregated outcome of one benchmark run in one pipeline mode."""

    mode: PipelineMode
    n_queries: int
    mean_recall_pct: float
    cross_lingual_share_pct: float
    per_record: tuple[EvalResult, ...]
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = 100.0 * sum(r.recall for r in self.per_record) / len(self.per_record)
        if abs(self.mean_recall_pct - expected) > 1e-9:
            raise MetricError(
                f"mean_recall_pct {self.mean_recall_pct} inconsistent with per-record "
                f"recalls (expected {expected})"
            )


def aggregate(
    results: Sequence[EvalResult],
    mode: PipelineMode,
    translated_count: int,
    input_count: int,
    manifest: Optional[dict] = None,
) -> RunReport:
    """Fold per-record results into a RunReport.

    If the run produced no context passages at all (input_count == 0, e.g.
    everything was filtered), the cross-lingual share is reported as 0.
    """
    if not results:
        raise MetricError("cannot aggregate an empty result list")
    share = cross_lingual_share(translated_count, input_count) if input_count > 0 else 0.0
    return RunReport(
        mode=mode,
        n_queries=len(results),
        mean_recall_pct=100.0 * sum(r.recall for r in results) / len(results),
        cross_lingual_share_pct=100.0 * share,
        per_record=tuple(results),
        manifest=dict(manifest or {}),
    )


def report_to_dict(report: RunReport) -> dict:
    """JSON-ready mirror of a RunReport."""
    return {
        "mode": report.mode.value,
        "n_queries": report.n_queries,
        "mean_recall_pct": report.mean_recall_pct,
        "cross_lingual_share_pct": report.cross_lingual_share_pct,
        "per_record": [
            {
                "record_id": r.record_id,
                "recall": r.recall,
                "best_gold_index": r.best_gold_index,
                "failed": r.failed,
            }
            for r in report.per_record
        ],
        "manifest": report.manifest,
    }


def report_from_dict(payload: dict) -> RunReport:
    per_record = tuple(
        EvalResult(
            record_id=r["record_id"],
            recall=r["recall"],
            best_gold_index=r["best_gold_index"],
            failed=r.get("failed", False),
        )
        for r in payload["per_record"]
    )
    return RunReport(
        mode=PipelineMode(payload["mode"]),
        n_queries=payload["n_queries"],
        mean_recall_pct=payload["mean_recall_pct"],
        cross_lingual_share_pct=payload["cross_lingual_share_pct"],
        per_record=per_record,
        manifest=dict(payload.get("manifest", {})),
    )


def render_table(reports: Sequence[RunReport]) -> str:
    """Fixed-width comparison table, one row per pipeline mode, one decimal."""
    header = f"{'Mode':<6} {'Queries':>8} {'Recall %':>9} {'CrossLingual %':>15}"
    rule = "-" * len(header)
    rows = [
        f"{r.mode.value:<6} {r.n_queries:>8} {r.mean_recall_pct:>9.1f} "
        f"{r.cross_lingual_share_pct:>15.1f}"
        for r in reports
    ]
    return "\n".join([header, rule, *rows])
