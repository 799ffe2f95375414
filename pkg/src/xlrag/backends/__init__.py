from .base import (
    BackendConfig,
    ChatBackend,
    ChatRequest,
    EmbedBackend,
    RerankBackend,
    TranslateBackend,
    l2_normalize_rows,
)
from .http import HttpChatBackend, HttpEmbedBackend, HttpRerankBackend, HttpTranslateBackend
from .mock import (
    EchoChatBackend,
    FailingChatBackend,
    FailingTranslateBackend,
    GarbageChatBackend,
    MockEmbedBackend,
    MockJudgeBackend,
    MockRerankBackend,
    MockTranslateBackend,
    ScriptedChatBackend,
    ScriptedEmbedBackend,
    SequenceChatBackend,
)

__all__ = [
    "BackendConfig",
    "ChatBackend",
    "ChatRequest",
    "EmbedBackend",
    "RerankBackend",
    "TranslateBackend",
    "l2_normalize_rows",
    "HttpChatBackend",
    "HttpEmbedBackend",
    "HttpRerankBackend",
    "HttpTranslateBackend",
    "EchoChatBackend",
    "FailingChatBackend",
    "FailingTranslateBackend",
    "GarbageChatBackend",
    "MockEmbedBackend",
    "MockJudgeBackend",
    "MockRerankBackend",
    "MockTranslateBackend",
    "ScriptedChatBackend",
    "ScriptedEmbedBackend",
    "SequenceChatBackend",
]
