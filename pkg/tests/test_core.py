from __future__ import annotations

import pytest

from xlrag.core import (
    ContextPassage,
    ContextStatus,
    Passage,
    PipelineMode,
    QARecord,
    QualityScores,
    Query,
    RetrievedPassage,
    validate_language,
    validate_result_set,
)
from xlrag.errors import ValidationError


class TestValidateLanguage:
    def test_uppercase_normalized(self):
        assert validate_language("KO") == "ko"

    def test_identity(self):
        assert validate_language("ko") == "ko"

    def test_three_letters_rejected(self):
        with pytest.raises(ValidationError, match="kor"):
            validate_language("kor")

    @pytest.mark.parametrize("bad", ["k", "", "k1", "음악", "k-", " k"])
    def test_malformed_rejected(self, bad):
        with pytest.raises(ValidationError):
            validate_language(bad)


class TestQuery:
    def test_lang_normalized(self):
        assert Query(id="q", text="hello", lang="FI").lang == "fi"

    def test_empty_text_rejected(self):
        with pytest.raises(ValidationError):
            Query(id="q", text="   ", lang="ko")


class TestPassage:
    def test_optional_fields(self):
        p = Passage(id="p", text="body")
        assert p.title is None and p.lang is None

    def test_empty_text_rejected(self):
        with pytest.raises(ValidationError):
            Passage(id="p", text="")

    def test_declared_lang_validated(self):
        with pytest.raises(ValidationError):
            Passage(id="p", text="body", lang="english")


class TestQualityScores:
    def test_valid(self):
        scores = QualityScores(5.0, 2.5, 4.3)
        assert scores.as_tuple() == (5.0, 2.5, 4.3)

    @pytest.mark.parametrize("bad", [-0.1, 5.1, float("nan")])
    def test_out_of_range(self, bad):
        with pytest.raises(ValidationError):
            QualityScores(bad, 1.0, 1.0)

    def test_unquantized_rejected(self):
        with pytest.raises(ValidationError, match="one decimal"):
            QualityScores(4.25, 1.0, 1.0)

    def test_boolean_rejected(self):
        with pytest.raises(ValidationError):
            QualityScores(True, 1.0, 1.0)


def _passage(pid="p1", text="source text"):
    return Passage(id=pid, text=text)


class TestContextPassage:
    def test_original_must_mirror_source(self):
        cp = ContextPassage(
            source=_passage(), status=ContextStatus.ORIGINAL, display_text="source text"
        )
        assert cp.in_context and not cp.translated
        with pytest.raises(ValidationError):
            ContextPassage(
                source=_passage(), status=ContextStatus.ORIGINAL, display_text="edited"
            )

    def test_original_must_not_carry_translation(self):
        with pytest.raises(ValidationError):
            ContextPassage(
                source=_passage(),
                status=ContextStatus.ORIGINAL,
                display_text="source text",
                translated_text="x",
            )

    def test_untagged_requires_exact_display(self):
        cp = ContextPassage(
            source=_passage(),
            status=ContextStatus.TRANSLATED_UNTAGGED,
            display_text="uebersetzt",
            translated_text="uebersetzt",
        )
        assert cp.translated
        with pytest.raises(ValidationError):
            ContextPassage(
                source=_passage(),
                status=ContextStatus.TRANSLATED_UNTAGGED,
                display_text="uebersetzt plus tag",
                translated_text="uebersetzt",
            )

    def test_untagged_rejects_scores(self):
        with pytest.raises(ValidationError):
            ContextPassage(
                source=_passage(),
                status=ContextStatus.TRANSLATED_UNTAGGED,
                display_text="t",
                translated_text="t",
                scores=QualityScores(1.0, 1.0, 1.0),
            )

    def test_tagged_requires_scores_and_suffix(self):
        cp = ContextPassage(
            source=_passage(),
            status=ContextStatus.TRANSLATED_TAGGED,
            display_text="uebersetzt TAG",
            translated_text="uebersetzt",
            scores=QualityScores(1.0, 1.0, 1.0),
        )
        assert cp.display_text.startswith(cp.translated_text)
        with pytest.raises(ValidationError):
            ContextPassage(
                source=_passage(),
                status=ContextStatus.TRANSLATED_TAGGED,
                display_text="uebersetzt",
                translated_text="uebersetzt",
                scores=QualityScores(1.0, 1.0, 1.0),
            )

    def test_unscored_is_untagged_without_scores(self):
        cp = ContextPassage(
            source=_passage(),
            status=ContextStatus.TRANSLATED_UNSCORED,
            display_text="t",
            translated_text="t",
        )
        assert cp.translated and cp.scores is None

    def test_filtered_out_is_unconstrained(self):
        cp = ContextPassage(
            source=_passage(), status=ContextStatus.FILTERED_OUT, display_text="anything"
        )
        assert not cp.in_context


class TestResultSetValidation:
    def test_valid_set(self):
        results = [
            RetrievedPassage(passage=_passage("a"), retrieval_score=0.9, rank=1, rerank_score=2.0),
            RetrievedPassage(passage=_passage("b"), retrieval_score=0.8, rank=2, rerank_score=1.0),
        ]
        validate_result_set(results)

    def test_tie_must_be_id_ordered(self):
        results = [
            RetrievedPassage(passage=_passage("b"), retrieval_score=0.9, rank=1, rerank_score=1.0),
            RetrievedPassage(passage=_passage("a"), retrieval_score=0.8, rank=2, rerank_score=1.0),
        ]
        with pytest.raises(ValidationError, match="tied"):
            validate_result_set(results)

    def test_rank_gap_rejected(self):
        results = [
            RetrievedPassage(passage=_passage("a"), retrieval_score=0.9, rank=1),
            RetrievedPassage(passage=_passage("b"), retrieval_score=0.8, rank=3),
        ]
        with pytest.raises(ValidationError, match="permutation"):
            validate_result_set(results)

    def test_duplicate_ids_rejected(self):
        results = [
            RetrievedPassage(passage=_passage("a"), retrieval_score=0.9, rank=1),
            RetrievedPassage(passage=_passage("a"), retrieval_score=0.8, rank=2),
        ]
        with pytest.raises(ValidationError, match="duplicate"):
            validate_result_set(results)

    def test_score_order_contradiction_rejected(self):
        results = [
            RetrievedPassage(passage=_passage("a"), retrieval_score=0.9, rank=1, rerank_score=1.0),
            RetrievedPassage(passage=_passage("b"), retrieval_score=0.8, rank=2, rerank_score=2.0),
        ]
        with pytest.raises(ValidationError, match="contradicts"):
            validate_result_set(results)

    def test_non_positive_rank_rejected(self):
        with pytest.raises(ValidationError):
            RetrievedPassage(passage=_passage("a"), retrieval_score=0.5, rank=0)


class TestQARecord:
    def test_gold_answers_required(self):
        with pytest.raises(ValidationError):
            QARecord(id="r", question="q?", lang="ko", gold_answers=())

    def test_answers_stored_verbatim(self):
        record = QARecord(id="r", question="q?", lang="ko", gold_answers=("  Ans ",))
        assert record.gold_answers == ("  Ans ",)


def test_pipeline_modes_closed_enumeration():
    assert {m.value for m in PipelineMode} == {"base", "cross", "dkm", "qtt", "hard"}
    with pytest.raises(ValueError):
        PipelineMode("soft")
