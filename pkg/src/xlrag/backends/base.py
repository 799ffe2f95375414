"""Contracts for the external model services every stage talks to.

Five roles exist (embedder, reranker, translator, judge, generator) but
only four capabilities: embed, rerank, translate, chat. Judges and
generators are both chat backends wired to different endpoints.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Protocol, Sequence, runtime_checkable

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class BackendConfig:
    """Connection settings for one model service."""

    base_url: str
    model_name: str
    api_key: Optional[str] = None
    timeout: float = 30.0
    max_retries: int = 2
    parallelism: int = 1
    language_code_map: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValidationError(f"timeout must be positive, got {self.timeout}")
        if self.max_retries < 0:
            raise ValidationError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.parallelism < 1:
            raise ValidationError(f"parallelism must be >= 1, got {self.parallelism}")


@dataclass(frozen=True)
class ChatRequest:
    """One system/user exchange. Temperature defaults to 0 so that runs
    are as reproducible as the serving stack allows."""

    system: str
    user: str
    temperature: float = 0.0
    max_tokens: int = 512

    def __post_init__(self):
        if not self.system or not self.user:
            raise ValidationError("chat request requires non-empty system and user messages")
        if self.temperature < 0:
            raise ValidationError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_tokens < 1:
            raise ValidationError(f"max_tokens must be positive, got {self.max_tokens}")


@runtime_checkable
class EmbedBackend(Protocol):
    fingerprint: str

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        """One L2-normalized vector per text, same dimension across the batch."""


@runtime_checkable
class RerankBackend(Protocol):
    fingerprint: str

    def rerank_pairs(self, query: str, passages: Sequence[str]) -> list[float]:
        """One relevance score per passage, order-aligned with the input."""


@runtime_checkable
class TranslateBackend(Protocol):
    fingerprint: str

    def translate_text(self, text: str, src: str, tgt: str) -> str:
        """Translate text from src to tgt (src != tgt is the caller's job)."""


@runtime_checkable
class ChatBackend(Protocol):
    fingerprint: str

    def chat_complete(self, request: ChatRequest) -> str:
        """The assistant text, verbatim and untrimmed."""


def check_embed_inputs(texts: Sequence[str]) -> None:
    if not texts:
        raise ValidationError("embed_batch requires at least one text")
    for i, text in enumerate(texts):
        if not text:
            raise ValidationError(f"embed_batch text at position {i} is empty")


def l2_normalize_rows(matrix: np.ndarray) -> np.ndarray:
    """Scale every row to unit L2 norm (float64)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValidationError("cannot normalize a zero vector")
    return matrix / norms
