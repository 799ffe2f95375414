"""Generation prompt assembly and answer retrieval.

Documents enter the user message in rank order for every mode; quality
awareness is expressed through the system instructions and the inline
tags, never by resorting the evidence. The quality-aware system prompt
is used by the tagging modes; the baseline modes get the same prompt
with the score-related sentences removed, so tagging is the only
variable between them.
"""
from __future__ import annotations

from .backends.base import ChatBackend, ChatRequest
from .core import ContextPassage, PipelineMode, Query
from .errors import GenerationError
from .locales import resources_or_generic

_QUALITY_MODES = (PipelineMode.QTT, PipelineMode.HARD)


def _system_for(query: Query, mode: PipelineMode) -> str:
    resources = resources_or_generic(query.lang)
    if mode in _QUALITY_MODES:
        return resources.generation_quality_system
    return resources.generation_plain_system


def build_generation_prompt(
    query: Query,
    context: list[ContextPassage] | tuple[ContextPassage, ...],
    mode: PipelineMode,
    *,
    max_tokens: int = 512,
) -> ChatRequest:
    """Assemble the final chat request from the processed context.

    Passage blocks appear in rank order, one blank line apart, inside the
    Background section; the question closes the message. Filtered-out
    entries never reach the prompt. An entirely empty context is an
    error here; the pipeline decides the fallback.
    """
    visible = [cp for cp in context if cp.in_context]
    if not visible:
        raise GenerationError(
            "no context passages remain for generation; caller must decide the fallback"
        )
    documents = "\n\n".join(cp.display_text for cp in visible)
    user = f"Background: {documents}\n\nQuestion: {query.text}"
    return ChatRequest(system=_system_for(query, mode), user=user, max_tokens=max_tokens)


def build_no_context_prompt(
    query: Query,
    mode: PipelineMode,
    *,
    max_tokens: int = 512,
) -> ChatRequest:
    """Question-only fallback for queries whose context was filtered empty."""
    return ChatRequest(
        system=_system_for(query, mode),
        user=f"Question: {query.text}",
        max_tokens=max_tokens,
    )


def generate_answer(request: ChatRequest, chat_backend: ChatBackend) -> str:
    """The generator completion, verbatim. Trimming happens only where the
    metric consumes it; the trace stores the untouched string."""
    return chat_backend.chat_complete(request)
