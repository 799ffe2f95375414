from __future__ import annotations

import random

import pytest

from xlrag.backends import (
    EchoChatBackend,
    MockEmbedBackend,
    MockJudgeBackend,
    MockRerankBackend,
    MockTranslateBackend,
)
from xlrag.core import Passage
from xlrag.index import build_index
from xlrag.pipeline import Backends

# English filler built from shipped stopwords so the Latin-script
# detector lands on "en" instead of the zero-hit fallback.
_EN_FILLER = "the answer is in this place and it is about the topic of"
_KO_FILLER = "이 문서는 한국어로 작성된 지식 본문이며 정답 정보가 들어 있다"


def make_mock_backends(generator=None) -> Backends:
    return Backends(
        embedder=MockEmbedBackend(),
        reranker=MockRerankBackend(),
        translator=MockTranslateBackend(),
        judge=MockJudgeBackend(),
        generator=generator if generator is not None else EchoChatBackend(),
    )


def make_mixed_corpus(n_ko: int, n_en: int, seed: int = 0) -> list[Passage]:
    """Korean and English passages with texts the script heuristic can read."""
    rng = random.Random(seed)
    passages = []
    for i in range(n_ko):
        extra = rng.randint(0, 999)
        passages.append(Passage(id=f"ko{i:03d}", text=f"{_KO_FILLER} {i}번 항목 {extra}"))
    for i in range(n_en):
        extra = rng.randint(0, 999)
        passages.append(Passage(id=f"en{i:03d}", text=f"{_EN_FILLER} item {i} number {extra}"))
    return passages


@pytest.fixture
def mock_backends() -> Backends:
    return make_mock_backends()


@pytest.fixture
def small_index(mock_backends):
    corpus = make_mixed_corpus(n_ko=6, n_en=4)
    return build_index(corpus, mock_backends.embedder)
