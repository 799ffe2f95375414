"""Cross-lingual retrieval-augmented generation with translation quality tagging.

The pipeline retrieves evidence with a multilingual dense index, reranks
it, translates cross-lingual passages into the query language, scores
each translation on three quality criteria with an LLM judge, attaches
the scores as non-destructive metadata tags, and evaluates end-to-end
answers with character 3-gram recall. Baseline variants (passthrough,
translate-everything, rewrite-everything, hard filtering) share all the
machinery so comparisons isolate the tagging step.
"""

from .core import (
    ContextPassage,
    ContextStatus,
    Passage,
    PipelineMode,
    QARecord,
    QualityScores,
    Query,
    RetrievedPassage,
    validate_language,
)
from .metrics import (
    EvalResult,
    RunReport,
    aggregate,
    best_recall_over_golds,
    char_trigram_recall,
    cross_lingual_share,
)
from .pipeline import Backends, PipelineConfig, PipelineTrace, run_benchmark, run_query

__version__ = "0.1.0"

__all__ = [
    "ContextPassage",
    "ContextStatus",
    "Passage",
    "PipelineMode",
    "QARecord",
    "QualityScores",
    "Query",
    "RetrievedPassage",
    "validate_language",
    "EvalResult",
    "RunReport",
    "aggregate",
    "best_recall_over_golds",
    "char_trigram_recall",
    "cross_lingual_share",
    "Backends",
    "PipelineConfig",
    "PipelineTrace",
    "run_benchmark",
    "run_query",
    "__version__",
]
