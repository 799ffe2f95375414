"""Deterministic in-process backends for tests, demos, and CI.

Every mock is a pure function of its inputs: two runs over identical
inputs produce byte-identical outputs. Each instance counts calls so
tests can assert which stages touched which services.
"""
from __future__ import annotations

import hashlib
import json
from typing import Optional, Sequence, Union

import numpy as np

from .._resources import load_json
from ..errors import BackendError, ContractViolation, ProtocolError
from ..metrics import char_trigram_recall
from .base import ChatRequest, check_embed_inputs

_GENERIC_SCORE_KEYS = ("Semantic Equivalence", "Grammatical Accuracy", "Naturalness & Fluency")


def _seed_from(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "little")


class MockEmbedBackend:
    """Unit vectors drawn from a content-hash-seeded RNG."""

    def __init__(self, dim: int = 32):
        self.dim = dim
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return f"mock-embed-d{self.dim}"

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        check_embed_inputs(texts)
        self.calls += 1
        rows = np.stack([self._vector(text) for text in texts])
        return rows

    def _vector(self, text: str) -> np.ndarray:
        rng = np.random.default_rng(_seed_from(text))
        vector = rng.standard_normal(self.dim)
        return vector / np.linalg.norm(vector)


class ScriptedEmbedBackend:
    """Returns caller-supplied vectors; for geometry-controlled tests."""

    def __init__(self, mapping: dict[str, Sequence[float]]):
        self.mapping = {k: np.asarray(v, dtype=np.float64) for k, v in mapping.items()}
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "scripted-embed"

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        check_embed_inputs(texts)
        self.calls += 1
        try:
            return np.stack([self.mapping[t] for t in texts])
        except KeyError as exc:
            raise ProtocolError(f"scripted embedder has no vector for {exc.args[0]!r}") from exc


class MockRerankBackend:
    """Relevance as character-trigram overlap between query and passage."""

    def __init__(self):
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "mock-rerank-trigram"

    def rerank_pairs(self, query: str, passages: Sequence[str]) -> list[float]:
        if not passages:
            raise ContractViolation("rerank_pairs requires at least one passage")
        self.calls += 1
        return [char_trigram_recall(query, passage) for passage in passages]


class MockTranslateBackend:
    """Prefixes the text with a reversible target-language marker."""

    def __init__(self):
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "mock-translate-marker"

    def translate_text(self, text: str, src: str, tgt: str) -> str:
        if src == tgt:
            raise ContractViolation(f"translate_text called with src == tgt == {src!r}")
        self.calls += 1
        return f"⟦{tgt}⟧{text}"

    @staticmethod
    def marker(tgt: str) -> str:
        return f"⟦{tgt}⟧"


class FailingTranslateBackend:
    """Always fails; exercises the drop-on-translation-failure policy."""

    def __init__(self, message: str = "translator unavailable"):
        self.message = message
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "mock-translate-failing"

    def translate_text(self, text: str, src: str, tgt: str) -> str:
        if src == tgt:
            raise ContractViolation(f"translate_text called with src == tgt == {src!r}")
        self.calls += 1
        raise BackendError(self.message, endpoint="mock://translate", attempts=1)


class ScriptedChatBackend:
    """Canned completions keyed by (system, user); optional default."""

    def __init__(self, responses: dict[tuple[str, str], str], default: Optional[str] = None):
        self.responses = dict(responses)
        self.default = default
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "mock-chat-scripted"

    def chat_complete(self, request: ChatRequest) -> str:
        self.calls += 1
        key = (request.system, request.user)
        if key in self.responses:
            return self.responses[key]
        if self.default is not None:
            return self.default
        raise ProtocolError("scripted chat backend has no response for this request")


class SequenceChatBackend:
    """Replays a fixed sequence of completions (or exceptions), repeating
    the last entry once exhausted; for retry-policy tests."""

    def __init__(self, outputs: Sequence[Union[str, Exception]]):
        if not outputs:
            raise ContractViolation("SequenceChatBackend needs at least one output")
        self.outputs = list(outputs)
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "mock-chat-sequence"

    def chat_complete(self, request: ChatRequest) -> str:
        index = min(self.calls, len(self.outputs) - 1)
        self.calls += 1
        output = self.outputs[index]
        if isinstance(output, Exception):
            raise output
        return output


class EchoChatBackend:
    """Answers with the first line of the user message."""

    def __init__(self):
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "mock-chat-echo"

    def chat_complete(self, request: ChatRequest) -> str:
        self.calls += 1
        return request.user.splitlines()[0] if request.user else ""


class FailingChatBackend:
    """Always raises; exercises generation-failure reporting."""

    def __init__(self, message: str = "chat backend unavailable"):
        self.message = message
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "mock-chat-failing"

    def chat_complete(self, request: ChatRequest) -> str:
        self.calls += 1
        raise BackendError(self.message, endpoint="mock://chat", attempts=1)


class MockJudgeBackend:
    """Valid localized score JSON with content-hash-derived values.

    The score keys are recovered from the assessment prompt itself (the
    one-shot example line always carries them), so one mock serves every
    registered language.
    """

    def __init__(self):
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "mock-judge-hash"

    def chat_complete(self, request: ChatRequest) -> str:
        self.calls += 1
        keys = self._keys_for(request.user)
        digest = hashlib.sha256(request.user.encode("utf-8")).digest()
        scores = [round((digest[i] % 51) / 10, 1) for i in range(3)]
        return json.dumps(dict(zip(keys, scores)), ensure_ascii=False)

    @staticmethod
    def _keys_for(user_text: str) -> Sequence[str]:
        table = load_json("locale.json")["languages"]
        for lang in sorted(table):
            keys = table[lang]["score_keys"]
            if all(key in user_text for key in keys):
                return keys
        if all(key in user_text for key in _GENERIC_SCORE_KEYS):
            return _GENERIC_SCORE_KEYS
        raise ProtocolError("mock judge found no known score keys in the prompt")


class GarbageChatBackend:
    """Returns prose that never contains a JSON object; exercises the
    unscored-after-retries path."""

    def __init__(self, text: str = "I am sorry, I cannot provide scores for this text."):
        self.text = text
        self.calls = 0

    @property
    def fingerprint(self) -> str:
        return "mock-chat-garbage"

    def chat_complete(self, request: ChatRequest) -> str:
        self.calls += 1
        return self.text
