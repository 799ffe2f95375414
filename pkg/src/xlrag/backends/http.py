"""HTTP implementations of the four backend capabilities.

Wire formats:
  chat      POST {base_url}/chat/completions   (chat-completions style)
  embed     POST {base_url}/embeddings         (embeddings style)
  rerank    POST {base_url}/rerank             {"model", "query", "documents"}
  translate POST {base_url}/translate          {"text", "src", "tgt"}

All requests are idempotent reads, so the retry loop (exponential
backoff, ``max_retries`` extra attempts) never duplicates side effects.
The api_key, when present, is sent as a bearer token.
"""
from __future__ import annotations

import time
from typing import Callable, Sequence

import numpy as np
import requests

from ..errors import BackendError, ContractViolation, ProtocolError, ValidationError
from .base import BackendConfig, ChatRequest, check_embed_inputs, l2_normalize_rows


class _HttpBackend:
    def __init__(
        self,
        config: BackendConfig,
        *,
        backoff_base: float = 0.5,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.backoff_base = backoff_base
        self._sleep = sleep

    @property
    def fingerprint(self) -> str:
        return f"{self._kind}:{self.config.model_name}"

    _kind = "http"

    def _url(self, path: str) -> str:
        return self.config.base_url.rstrip("/") + path

    def _post(self, path: str, payload: dict) -> dict:
        url = self._url(path)
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        attempts = self.config.max_retries + 1
        last_error: Exception | None = None
        for attempt in range(1, attempts + 1):
            try:
                response = requests.post(
                    url, json=payload, headers=headers, timeout=self.config.timeout
                )
                response.raise_for_status()
            except requests.RequestException as exc:
                last_error = exc
                if attempt < attempts:
                    self._sleep(self.backoff_base * 2 ** (attempt - 1))
                continue
            try:
                return response.json()
            except ValueError as exc:
                raise ProtocolError(f"{url} returned a non-JSON body") from exc
        raise BackendError(
            f"POST {url} failed after {attempts} attempts: {last_error}",
            endpoint=url,
            attempts=attempts,
        )


class HttpChatBackend(_HttpBackend):
    _kind = "http-chat"

    def chat_complete(self, request: ChatRequest) -> str:
        payload = {
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        data = self._post("/chat/completions", payload)
        try:
            content = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(f"malformed chat completion response: {data!r}") from exc
        if not isinstance(content, str) or not content:
            raise ProtocolError("chat backend returned an empty completion")
        return content


class HttpEmbedBackend(_HttpBackend):
    _kind = "http-embed"

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        check_embed_inputs(texts)
        payload = {"model": self.config.model_name, "input": list(texts)}
        data = self._post("/embeddings", payload)
        try:
            items = data["data"]
            if any("index" in item for item in items):
                items = sorted(items, key=lambda item: item["index"])
            vectors = [item["embedding"] for item in items]
        except (KeyError, TypeError) as exc:
            raise ProtocolError(f"malformed embeddings response: {data!r}") from exc
        if len(vectors) != len(texts):
            raise ProtocolError(
                f"embeddings response has {len(vectors)} vectors for {len(texts)} inputs"
            )
        lengths = {len(v) for v in vectors}
        if len(lengths) != 1:
            raise ProtocolError(f"embedding dimension mismatch across batch: {sorted(lengths)}")
        return l2_normalize_rows(np.asarray(vectors, dtype=np.float64))


class HttpRerankBackend(_HttpBackend):
    _kind = "http-rerank"

    def rerank_pairs(self, query: str, passages: Sequence[str]) -> list[float]:
        if not passages:
            raise ContractViolation("rerank_pairs requires at least one passage")
        payload = {
            "model": self.config.model_name,
            "query": query,
            "documents": list(passages),
        }
        data = self._post("/rerank", payload)
        scores: list[float | None] = [None] * len(passages)
        try:
            for result in data["results"]:
                scores[result["index"]] = float(result["relevance_score"])
        except (KeyError, TypeError, IndexError) as exc:
            raise ProtocolError(f"malformed rerank response: {data!r}") from exc
        if any(score is None for score in scores):
            raise ProtocolError("rerank response did not score every document")
        return scores  # type: ignore[return-value]


class HttpTranslateBackend(_HttpBackend):
    _kind = "http-translate"

    def translate_text(self, text: str, src: str, tgt: str) -> str:
        if src == tgt:
            raise ContractViolation(f"translate_text called with src == tgt == {src!r}")
        if not text:
            raise ValidationError("translate_text requires non-empty text")
        code_map = self.config.language_code_map
        payload = {
            "model": self.config.model_name,
            "text": text,
            "src": code_map.get(src, src),
            "tgt": code_map.get(tgt, tgt),
        }
        data = self._post("/translate", payload)
        translated = data.get("text") or data.get("translation")
        if not isinstance(translated, str) or not translated:
            raise ProtocolError("translation backend returned an empty response")
        return translated
