"""Domain types shared by every pipeline stage.

All types are immutable values: safe to share across threads and to key
tests on. Construction validates the per-type invariants; anything that
reaches a later stage can be trusted structurally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .errors import ValidationError


def validate_language(code: str) -> str:
    """Normalize a language code to lowercase two-letter ISO-639-1 form.

    Raises ValidationError for anything that is not exactly two ASCII
    letters after lowercasing.
    """
    if not isinstance(code, str):
        raise ValidationError(f"language code must be a string, got {type(code).__name__}")
    normalized = code.lower()
    if len(normalized) != 2 or not all("a" <= ch <= "z" for ch in normalized):
        raise ValidationError(
            f"invalid language code {code!r}: expected exactly two ASCII letters"
        )
    return normalized


class PipelineMode(str, Enum):
    """Closed set of pipeline variants."""

    BASE = "base"
    CROSS = "cross"
    DKM = "dkm"
    QTT = "qtt"
    HARD = "hard"


class ContextStatus(str, Enum):
    """How a retrieved passage was processed before reaching the generator."""

    ORIGINAL = "original"
    TRANSLATED_TAGGED = "translated_tagged"
    TRANSLATED_UNTAGGED = "translated_untagged"
    TRANSLATED_UNSCORED = "translated_unscored"
    FILTERED_OUT = "filtered_out"


#: Statuses that count as "translated" for the cross-lingual share statistic.
TRANSLATED_STATUSES = frozenset(
    {
        ContextStatus.TRANSLATED_TAGGED,
        ContextStatus.TRANSLATED_UNTAGGED,
        ContextStatus.TRANSLATED_UNSCORED,
    }
)


@dataclass(frozen=True)
class Query:
    """A user question in a given language."""

    id: str
    text: str
    lang: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValidationError(f"query {self.id!r} has empty text")
        object.__setattr__(self, "lang", validate_language(self.lang))


@dataclass(frozen=True)
class Passage:
    """A knowledge-base text unit. ``lang`` is None until declared or detected."""

    id: str
    text: str
    title: Optional[str] = None
    lang: Optional[str] = None

    def __post_init__(self):
        if not self.text:
            raise ValidationError(f"passage {self.id!r} has empty text")
        if self.lang is not None:
            object.__setattr__(self, "lang", validate_language(self.lang))


@dataclass(frozen=True)
class RetrievedPassage:
    """A passage with its position in a (re)ranked result set."""

    passage: Passage
    retrieval_score: float
    rank: int
    rerank_score: Optional[float] = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValidationError(f"rank must be positive, got {self.rank}")


def validate_result_set(results: Sequence[RetrievedPassage]) -> None:
    """Check the set-level invariants of a ranked result list.

    Ranks must be exactly 1..n with no duplicate ranks or passage ids, and
    when rerank scores are present the rank order must equal descending
    rerank score with ties broken by ascending passage id.
    """
    ranks = [r.rank for r in results]
    if sorted(ranks) != list(range(1, len(results) + 1)):
        raise ValidationError(f"ranks are not a permutation of 1..{len(results)}: {ranks}")
    ids = [r.passage.id for r in results]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate passage ids in result set")
    ordered = sorted(results, key=lambda r: r.rank)
    scored = [r for r in ordered if r.rerank_score is not None]
    if scored and len(scored) != len(ordered):
        raise ValidationError("mixed scored/unscored entries in reranked result set")
    for earlier, later in zip(scored, scored[1:]):
        if earlier.rerank_score < later.rerank_score:
            raise ValidationError(
                f"rank order contradicts rerank scores at ranks "
                f"{earlier.rank},{later.rank}"
            )
        if earlier.rerank_score == later.rerank_score and earlier.passage.id > later.passage.id:
            raise ValidationError(
                f"tied rerank scores not ordered by ascending id at ranks "
                f"{earlier.rank},{later.rank}"
            )


def _quantized_to_one_decimal(value: float) -> bool:
    return round(value, 1) == value


@dataclass(frozen=True)
class QualityScores:
    """The three translation-quality criterion scores, each in [0.0, 5.0].

    Values must already be quantized to one decimal place; parsing is
    responsible for quantization, construction only verifies it.
    """

    semantic_equivalence: float
    grammatical_accuracy: float
    naturalness_fluency: float

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValidationError(f"{name} must be a number, got {value!r}")
            if not 0.0 <= value <= 5.0:
                raise ValidationError(f"{name} out of range [0.0, 5.0]: {value!r}")
            if not _quantized_to_one_decimal(value):
                raise ValidationError(
                    f"{name} must be quantized to one decimal place: {value!r}"
                )

    def as_dict(self) -> dict[str, float]:
        return {
            "semantic_equivalence": self.semantic_equivalence,
            "grammatical_accuracy": self.grammatical_accuracy,
            "naturalness_fluency": self.naturalness_fluency,
        }

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.semantic_equivalence, self.grammatical_accuracy, self.naturalness_fluency)


@dataclass(frozen=True)
class ContextPassage:
    """A pipeline-processed passage as the generator will (or won't) see it.

    ``display_text`` is final: prompt assembly concatenates it verbatim.
    ``translated_text`` is byte-identical to what the translating backend
    returned; nothing downstream may edit it.
    """

    source: Passage
    status: ContextStatus
    display_text: str
    translated_text: Optional[str] = None
    scores: Optional[QualityScores] = None

    def __post_init__(self):
        status = self.status
        if status is ContextStatus.ORIGINAL:
            if self.translated_text is not None or self.scores is not None:
                raise ValidationError("original passage must carry no translation or scores")
            if self.display_text != self.source.text:
                raise ValidationError("original passage display_text must equal source text")
        elif status is ContextStatus.TRANSLATED_TAGGED:
            if self.translated_text is None or self.scores is None:
                raise ValidationError("tagged passage requires translated_text and scores")
            if not self.display_text.startswith(self.translated_text) or len(
                self.display_text
            ) <= len(self.translated_text):
                raise ValidationError(
                    "tagged passage display_text must be translated_text plus a tag"
                )
        elif status in (ContextStatus.TRANSLATED_UNTAGGED, ContextStatus.TRANSLATED_UNSCORED):
            if self.translated_text is None:
                raise ValidationError(f"{status.value} passage requires translated_text")
            if self.scores is not None:
                raise ValidationError(f"{status.value} passage must not carry scores")
            if self.display_text != self.translated_text:
                raise ValidationError(
                    f"{status.value} passage display_text must equal translated_text"
                )
        # FILTERED_OUT entries keep whatever state they were dropped in.

    @property
    def in_context(self) -> bool:
        """Whether this passage reaches the generation prompt."""
        return self.status is not ContextStatus.FILTERED_OUT

    @property
    def translated(self) -> bool:
        return self.status in TRANSLATED_STATUSES


@dataclass(frozen=True)
class QARecord:
    """One benchmark item: a question with its verbatim gold answers."""

    id: str
    question: str
    lang: str
    gold_answers: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "lang", validate_language(self.lang))
        object.__setattr__(self, "gold_answers", tuple(self.gold_answers))
        if not self.gold_answers:
            raise ValidationError(f"record {self.id!r} has no gold answers")
