"""Per-language prompt and tag resources.

Korean, Finnish, and Chinese ship with fully localized resources. Other
languages can be registered at runtime (or through the CLI config); they
get the generic English templates with the language name filled in.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ._resources import load_json, load_text
from .core import validate_language
from .errors import ConfigError

_BUILTIN_CODES = ("ko", "fi", "zh")
_LANG_PLACEHOLDER = "{query language}"


@dataclass(frozen=True)
class LanguageResources:
    """Everything language-specific one query language needs."""

    code: str
    name: str
    score_keys: tuple[str, str, str]
    tag_header: str
    judge_system: str
    rewrite_system: str
    assessment_template: str
    generation_quality_system: str
    generation_plain_system: str
    rewrite_template: str


def language_name(code: str) -> str:
    names = load_json("locale.json")["language_names"]
    return names.get(code, code)


def _builtin(code: str) -> LanguageResources:
    entry = load_json("locale.json")["languages"][code]
    return LanguageResources(
        code=code,
        name=entry["name"],
        score_keys=tuple(entry["score_keys"]),
        tag_header=entry["tag_header"],
        judge_system=entry["judge_system"],
        rewrite_system=entry["rewrite_system"],
        assessment_template=load_text(f"prompts/assessment_{code}.txt"),
        generation_quality_system=load_text(f"prompts/generation_quality_{code}.txt"),
        generation_plain_system=load_text(f"prompts/generation_plain_{code}.txt"),
        rewrite_template=load_text(f"prompts/rewrite_{code}.txt"),
    )


def _from_generic(code: str, name: Optional[str] = None) -> LanguageResources:
    name = name or language_name(code)
    generic = load_json("locale.json")["generic"]

    def fill(relname: str) -> str:
        return load_text(f"prompts/{relname}").replace(_LANG_PLACEHOLDER, name)

    return LanguageResources(
        code=code,
        name=name,
        score_keys=tuple(generic["score_keys"]),
        tag_header=generic["tag_header"],
        judge_system=generic["judge_system"],
        rewrite_system=generic["rewrite_system"],
        assessment_template=fill("assessment_generic.txt"),
        generation_quality_system=fill("generation_quality_generic.txt"),
        generation_plain_system=fill("generation_plain_generic.txt"),
        rewrite_template=fill("rewrite_generic.txt"),
    )


_registry: dict[str, LanguageResources] = {}


def _ensure_builtins() -> None:
    if not _registry:
        for code in _BUILTIN_CODES:
            _registry[code] = _builtin(code)


def register_language(code: str, name: Optional[str] = None) -> LanguageResources:
    """Register a non-builtin query language backed by the generic templates."""
    _ensure_builtins()
    code = validate_language(code)
    resources = _from_generic(code, name)
    _registry[code] = resources
    return resources


def registered_languages() -> tuple[str, ...]:
    _ensure_builtins()
    return tuple(sorted(_registry))


def language_resources(code: str) -> LanguageResources:
    """Resources for a registered language; ConfigError otherwise."""
    _ensure_builtins()
    try:
        return _registry[code]
    except KeyError:
        raise ConfigError(
            f"language {code!r} has no registered prompt/tag resources "
            f"(registered: {', '.join(sorted(_registry))})"
        ) from None


def resources_or_generic(code: str) -> LanguageResources:
    """Registered resources when available, otherwise unregistered generic
    English templates with the language name filled in. Generation supports
    any query language this way; scoring stays registration-gated."""
    _ensure_builtins()
    if code in _registry:
        return _registry[code]
    return _from_generic(code)


_ORIGINAL_MARKER = "{original english passage}"
_TRANSLATED_MARKER_RE = re.compile(r"\{translated [^{}]*passage\}")


def fill_assessment(template: str, original: str, translated: str) -> str:
    """Substitute both passage placeholders, leaving the rest byte-identical."""
    filled = template.replace(_ORIGINAL_MARKER, original)
    return _TRANSLATED_MARKER_RE.sub(lambda _: translated, filled)


def fill_rewrite(template: str, question: str, passage: str) -> str:
    return template.replace("{question}", question).replace("{passage}", passage)
