"""Source-language detection for retrieved passages.

A declared corpus language always wins. Otherwise a script heuristic
classifies by the majority Unicode script among letters: Hangul maps to
Korean, Han to Chinese, and Latin-script text is disambiguated between
the configured Latin-script languages by stopword hit ratio.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Optional

from ._resources import load_stopwords
from .core import Passage, validate_language
from .errors import DetectionError

_WORD_RE = re.compile(r"[^\W\d_]+")

METHOD_DECLARED = "declared"
METHOD_SCRIPT = "script_heuristic"
METHOD_EXTERNAL = "external"


@dataclass(frozen=True)
class DetectionResult:
    lang: str
    confidence: float
    method: str
    warning: Optional[str] = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise DetectionError(f"confidence out of [0, 1]: {self.confidence}")
        if self.method == METHOD_DECLARED and self.confidence != 1.0:
            raise DetectionError("declared language must have confidence 1.0")


def _default_stopwords() -> Mapping[str, frozenset[str]]:
    return {"en": load_stopwords("en"), "fi": load_stopwords("fi")}


@dataclass(frozen=True)
class DetectorConfig:
    """Knobs for detection. ``external_classifier``, when set, is consulted
    for undeclared passages instead of the script heuristic; it must return
    a two-letter language code."""

    latin_candidates: tuple[str, ...] = ("en", "fi")
    stopwords: Mapping[str, frozenset[str]] = field(default_factory=_default_stopwords)
    external_classifier: Optional[Callable[[str], str]] = None


@lru_cache(maxsize=65536)
def _script_of(codepoint: int) -> str:
    name = unicodedata.name(chr(codepoint), "")
    if name.startswith("HANGUL"):
        return "hangul"
    if name.startswith(("CJK UNIFIED", "CJK COMPATIBILITY")):
        return "han"
    if name.startswith("LATIN"):
        return "latin"
    return "other"


def detect_language(passage: Passage, config: Optional[DetectorConfig] = None) -> DetectionResult:
    """Decide the source language of a passage.

    Raises DetectionError when the text contains no letters at all. Latin
    text with zero stopword hits for every candidate falls back to "en"
    with confidence 0.0 and a warning rather than failing the passage.
    """
    config = config or DetectorConfig()
    if passage.lang is not None:
        return DetectionResult(passage.lang, 1.0, METHOD_DECLARED)

    if config.external_classifier is not None:
        code = validate_language(config.external_classifier(passage.text))
        return DetectionResult(code, 1.0, METHOD_EXTERNAL)

    counts = {"hangul": 0, "han": 0, "latin": 0, "other": 0}
    total = 0
    for ch in passage.text:
        if ch.isalpha():
            total += 1
            counts[_script_of(ord(ch))] += 1
    if total == 0:
        raise DetectionError(f"passage {passage.id!r} contains no letters")

    majority = max(("hangul", "han", "latin", "other"), key=lambda s: counts[s])
    fraction = counts[majority] / total

    if majority == "hangul":
        return DetectionResult("ko", fraction, METHOD_SCRIPT)
    if majority == "han":
        return DetectionResult("zh", fraction, METHOD_SCRIPT)
    if majority == "latin":
        tokens = _WORD_RE.findall(passage.text.lower())
        best_lang, best_ratio = None, 0.0
        for lang in config.latin_candidates:
            words = config.stopwords.get(lang, frozenset())
            ratio = sum(1 for token in tokens if token in words) / len(tokens)
            if best_lang is None or ratio > best_ratio:
                best_lang, best_ratio = lang, ratio
        if best_ratio > 0.0:
            return DetectionResult(best_lang, best_ratio, METHOD_SCRIPT)
        return DetectionResult(
            "en",
            0.0,
            METHOD_SCRIPT,
            warning=f"passage {passage.id!r}: no stopword hits for any Latin candidate",
        )
    return DetectionResult(
        "en",
        0.0,
        METHOD_SCRIPT,
        warning=f"passage {passage.id!r}: majority script is unsupported",
    )
