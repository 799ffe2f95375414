"""Translation quality scoring, tag rendering, and hard filtering.

The judge is asked for the three criterion scores in the query language
and must answer in JSON. Judges wrap JSON in prose despite instructions,
so parsing extracts the first balanced JSON object from the completion;
it never invents scores. A translation whose judge output stays unusable
after retries is kept in context unscored, not dropped: scorer
availability is not evidence quality.

Tags are pure metadata. ``attach_tag`` appends the rendered tag after
the translation and never edits the translation itself; stripping the
tag suffix recovers the translator output byte-exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .backends.base import ChatBackend, ChatRequest
from .core import ContextPassage, ContextStatus, QualityScores
from .errors import (
    BackendError,
    ContractViolation,
    ProtocolError,
    ScoreParseError,
    ScoreRangeError,
    ValidationError,
)
from .locales import fill_assessment, language_resources

FILTER_RULE_ALL_BELOW = "all-below"
FILTER_RULE_ANY_BELOW = "any-below"


def build_assessment_prompt(original: str, translated: str, lang: str) -> str:
    """The localized judge prompt with both passages substituted in.

    Everything except the two placeholders is byte-identical to the
    shipped template resource.
    """
    resources = language_resources(lang)
    return fill_assessment(resources.assessment_template, original, translated)


def _first_json_object(raw: str) -> dict:
    """First balanced top-level ``{...}`` substring that parses as a JSON
    object. Balanced-but-invalid blobs are skipped; none at all raises."""
    for start, ch in enumerate(raw):
        if ch != "{":
            continue
        depth = 0
        in_string = False
        escaped = False
        for end in range(start, len(raw)):
            c = raw[end]
            if in_string:
                if escaped:
                    escaped = False
                elif c == "\\":
                    escaped = True
                elif c == '"':
                    in_string = False
            elif c == '"':
                in_string = True
            elif c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    try:
                        parsed = json.loads(raw[start : end + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(parsed, dict):
                        return parsed
                    break
        # unbalanced or unparseable from this start; try the next brace
    raise ScoreParseError("no JSON object found in judge output")


def _as_score(key: str, value: object) -> float:
    if isinstance(value, bool) or value is None:
        raise ScoreParseError(f"score {key!r} is not a number: {value!r}")
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ScoreParseError(f"score {key!r} is not a number: {value!r}") from None
    if not isinstance(value, (int, float)):
        raise ScoreParseError(f"score {key!r} is not a number: {value!r}")
    if not 0.0 <= value <= 5.0:
        raise ScoreRangeError(f"score {key!r} out of range [0.0, 5.0]: {value}")
    return round(float(value), 1)


def parse_scores(raw: str, lang: str) -> QualityScores:
    """Extract the three localized criterion scores from a judge completion.

    Values are validated against [0.0, 5.0] (no clamping) and quantized
    to one decimal place.
    """
    resources = language_resources(lang)
    obj = _first_json_object(raw)
    values = []
    for key in resources.score_keys:
        if key not in obj:
            raise ScoreParseError(f"judge output is missing key {key!r}")
        values.append(_as_score(key, obj[key]))
    return QualityScores(*values)


@dataclass(frozen=True)
class ScoreOutcome:
    """Result of one scoring attempt chain. ``scores`` is None when the
    judge never produced usable output (the unscored marker)."""

    scores: Optional[QualityScores]
    attempts: int
    failure: Optional[str] = None


def score_translation(
    original: str,
    translated: str,
    lang: str,
    chat_backend: ChatBackend,
    max_retries: int = 2,
) -> ScoreOutcome:
    """Ask the judge for quality scores, retrying unusable output.

    The identical prompt is retried up to ``max_retries`` extra times on
    parse or range failures. Transport failures are not retried here (the
    backend already retried them) and yield the unscored marker with the
    reason. Scores are never fabricated.
    """
    if not translated:
        raise ValidationError("score_translation requires a non-empty translation")
    resources = language_resources(lang)
    request = ChatRequest(
        system=resources.judge_system,
        user=build_assessment_prompt(original, translated, lang),
    )
    last_error: Optional[Exception] = None
    attempts = max_retries + 1
    for attempt in range(1, attempts + 1):
        try:
            raw = chat_backend.chat_complete(request)
        except (BackendError, ProtocolError) as exc:
            return ScoreOutcome(None, attempt, failure=f"judge backend failure: {exc}")
        try:
            return ScoreOutcome(parse_scores(raw, lang), attempt)
        except (ScoreParseError, ScoreRangeError) as exc:
            last_error = exc
    return ScoreOutcome(
        None, attempts, failure=f"judge output unusable after {attempts} attempts: {last_error}"
    )


def render_tag(scores: QualityScores, lang: str) -> str:
    """The localized quality tag: a leading space, the header token, and
    the three ``key: value`` pairs with exactly one decimal digit."""
    resources = language_resources(lang)
    pairs = ", ".join(
        f"{key}: {value:.1f}" for key, value in zip(resources.score_keys, scores.as_tuple())
    )
    return f" {resources.tag_header} {pairs}"


def parse_tag(tag: str, lang: str) -> QualityScores:
    """Recover the exact quantized scores from a rendered tag.

    Inverse of render_tag: parse_tag(render_tag(s, lang), lang) == s.
    """
    resources = language_resources(lang)
    prefix = f" {resources.tag_header} "
    if not tag.startswith(prefix):
        raise ScoreParseError(f"tag does not start with {prefix!r}")
    parts = tag[len(prefix) :].split(", ")
    if len(parts) != len(resources.score_keys):
        raise ScoreParseError(f"expected {len(resources.score_keys)} score pairs, got {len(parts)}")
    values = []
    for key, part in zip(resources.score_keys, parts):
        marker = f"{key}: "
        if not part.startswith(marker):
            raise ScoreParseError(f"tag pair {part!r} does not carry key {key!r}")
        values.append(_as_score(key, part[len(marker) :]))
    return QualityScores(*values)


def strip_tag(display_text: str, scores: QualityScores, lang: str) -> str:
    """Remove the rendered tag suffix, recovering the translation exactly."""
    tag = render_tag(scores, lang)
    if not display_text.endswith(tag):
        raise ContractViolation("display text does not end with the rendered tag")
    return display_text[: -len(tag)]


def attach_tag(cp: ContextPassage, scores: QualityScores, lang: str) -> ContextPassage:
    """Append the rendered tag to a translated passage.

    Query-language originals never get a tag; calling this on one is a
    contract violation, as is calling it on a passage with no translation.
    """
    if cp.status is ContextStatus.ORIGINAL:
        raise ContractViolation("originals carry no quality tag")
    if cp.translated_text is None:
        raise ContractViolation(f"cannot tag a passage with no translation ({cp.status.value})")
    return replace(
        cp,
        status=ContextStatus.TRANSLATED_TAGGED,
        scores=scores,
        display_text=cp.translated_text + render_tag(scores, lang),
    )


def _excluded(scores: QualityScores, threshold: float, rule: str) -> bool:
    below = [value < threshold for value in scores.as_tuple()]
    if rule == FILTER_RULE_ALL_BELOW:
        return all(below)
    if rule == FILTER_RULE_ANY_BELOW:
        return any(below)
    raise ValidationError(f"unknown filter rule {rule!r}")


def hard_filter(
    passages: Sequence[ContextPassage],
    threshold: float = 3.5,
    rule: str = FILTER_RULE_ALL_BELOW,
) -> list[ContextPassage]:
    """Mark low-scoring translations as filtered_out.

    Under the default rule a passage is excluded iff it has scores and
    every criterion is strictly below the threshold (a score exactly at
    the threshold retains the passage). Originals and unscored passages
    are always retained. Order is preserved and excluded entries stay in
    the list with status filtered_out so traces keep the full picture.
    """
    if not 0.0 <= threshold <= 5.0:
        raise ValidationError(f"threshold out of [0, 5]: {threshold}")
    if rule not in (FILTER_RULE_ALL_BELOW, FILTER_RULE_ANY_BELOW):
        raise ValidationError(f"unknown filter rule {rule!r}")
    result = []
    for cp in passages:
        if (
            cp.status is ContextStatus.TRANSLATED_TAGGED
            and cp.scores is not None
            and _excluded(cp.scores, threshold, rule)
        ):
            result.append(replace(cp, status=ContextStatus.FILTERED_OUT))
        else:
            result.append(cp)
    return result
