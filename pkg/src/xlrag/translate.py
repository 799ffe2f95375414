"""The bypass-or-translate stage.

Passages already in the query language pass through byte-identical; the
pipeline must never touch in-language evidence. Foreign passages are
translated whole, and the translator's output is preserved exactly. A
passage whose translation hard-fails is dropped from context (recorded
as filtered_out) rather than silently passed through in the wrong
language or aborting the whole query.
"""
from __future__ import annotations

from typing import Optional

from .backends.base import TranslateBackend
from .core import ContextPassage, ContextStatus, RetrievedPassage
from .errors import BackendError, DetectionError, ProtocolError
from .langid import DetectorConfig, detect_language


def translate_if_needed(
    item: RetrievedPassage,
    query_lang: str,
    translator: TranslateBackend,
    detector_config: Optional[DetectorConfig] = None,
    *,
    max_chars: Optional[int] = None,
    warnings: Optional[list[str]] = None,
) -> ContextPassage:
    """Detect the passage language and translate it unless it already
    matches the query language.

    ``max_chars``, when set, truncates the translator input (some MT
    models have hard input limits); truncation is reported through
    ``warnings``. Detection and translation failures drop the passage
    (status filtered_out) with the reason appended to ``warnings``.
    """
    sink = warnings if warnings is not None else []
    passage = item.passage
    try:
        detection = detect_language(passage, detector_config)
    except DetectionError as exc:
        sink.append(f"passage {passage.id!r} dropped: {exc}")
        return ContextPassage(
            source=passage, status=ContextStatus.FILTERED_OUT, display_text=passage.text
        )
    if detection.warning:
        sink.append(detection.warning)

    if detection.lang == query_lang:
        return ContextPassage(
            source=passage, status=ContextStatus.ORIGINAL, display_text=passage.text
        )

    text = passage.text
    if max_chars is not None and len(text) > max_chars:
        text = text[:max_chars]
        sink.append(
            f"passage {passage.id!r} truncated to {max_chars} characters before translation"
        )
    try:
        translated = translator.translate_text(text, detection.lang, query_lang)
    except (BackendError, ProtocolError) as exc:
        sink.append(f"passage {passage.id!r} dropped: translation failed: {exc}")
        return ContextPassage(
            source=passage, status=ContextStatus.FILTERED_OUT, display_text=passage.text
        )
    return ContextPassage(
        source=passage,
        status=ContextStatus.TRANSLATED_UNTAGGED,
        display_text=translated,
        translated_text=translated,
    )
