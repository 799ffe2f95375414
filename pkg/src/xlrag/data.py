"""JSON Lines ingestion for benchmarks and knowledge bases, plus report IO.

Everything is UTF-8 JSONL so converters from the public dataset dumps
stay one-liners; see the README for the conversion recipes. Reports are
single JSON documents with a schema tag so stale files fail loudly.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Sequence

from .core import Passage, QARecord, validate_language
from .errors import IngestError, SchemaError, ValidationError
from .metrics import RunReport, report_from_dict, report_to_dict

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "xlrag/run-report@1"
REPORT_SET_SCHEMA = "xlrag/run-report-set@1"


def _iter_jsonl(path: Path):
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: malformed JSON: {exc}") from exc


def load_qa(path: str | Path, lang: str) -> list[QARecord]:
    """Load benchmark records: one ``{id, question, answers}`` object per line.

    Records with no usable gold answers are rejected with their line
    number; a file yielding zero records is an error.
    """
    path = Path(path)
    lang = validate_language(lang)
    records: list[QARecord] = []
    for lineno, row in _iter_jsonl(path):
        if not isinstance(row, dict):
            raise IngestError(f"{path}:{lineno}: expected a JSON object")
        try:
            record_id = str(row["id"])
            question = row["question"]
            answers = row["answers"]
        except KeyError as exc:
            raise IngestError(f"{path}:{lineno}: missing field {exc.args[0]!r}") from None
        if not isinstance(question, str):
            raise IngestError(f"{path}:{lineno}: question must be a string")
        if not isinstance(answers, list) or not all(isinstance(a, str) for a in answers):
            raise IngestError(f"{path}:{lineno}: answers must be a list of strings")
        usable = [a for a in answers if a.strip()]
        if not usable:
            raise IngestError(f"{path}:{lineno}: record {record_id!r} has no gold answers")
        records.append(
            QARecord(id=record_id, question=question, lang=lang, gold_answers=tuple(answers))
        )
    if not records:
        raise IngestError(f"{path}: no valid records")
    return records


def load_kb(path: str | Path) -> list[Passage]:
    """Load knowledge-base passages: ``{id, title?, text, lang?}`` per line.

    Empty-text rows are skipped with a warning; duplicate ids are an
    error because the index requires unique identities.
    """
    path = Path(path)
    passages: list[Passage] = []
    seen: dict[str, int] = {}
    for lineno, row in _iter_jsonl(path):
        if not isinstance(row, dict):
            raise IngestError(f"{path}:{lineno}: expected a JSON object")
        try:
            passage_id = str(row["id"])
            text = row["text"]
        except KeyError as exc:
            raise IngestError(f"{path}:{lineno}: missing field {exc.args[0]!r}") from None
        if not isinstance(text, str) or not text.strip():
            logger.warning("%s:%d: skipping passage %r with empty text", path, lineno, passage_id)
            continue
        if passage_id in seen:
            raise IngestError(
                f"{path}:{lineno}: duplicate passage id {passage_id!r} "
                f"(first seen on line {seen[passage_id]})"
            )
        seen[passage_id] = lineno
        try:
            passages.append(
                Passage(id=passage_id, text=text, title=row.get("title"), lang=row.get("lang"))
            )
        except ValidationError as exc:
            raise IngestError(f"{path}:{lineno}: {exc}") from exc
    if not passages:
        raise IngestError(f"{path}: no usable passages")
    return passages


def _dump_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")


def save_report(path: str | Path, report: RunReport) -> None:
    _dump_json(Path(path), {"schema": REPORT_SCHEMA, "report": report_to_dict(report)})


def load_report(path: str | Path) -> RunReport:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("schema") != REPORT_SCHEMA:
        raise SchemaError(f"{path}: expected schema {REPORT_SCHEMA!r}")
    try:
        return report_from_dict(payload["report"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: malformed report body: {exc}") from exc


def save_report_set(path: str | Path, reports: Sequence[RunReport]) -> None:
    _dump_json(
        Path(path),
        {"schema": REPORT_SET_SCHEMA, "reports": [report_to_dict(r) for r in reports]},
    )


def load_reports(path: str | Path) -> list[RunReport]:
    """Load either a single-report file or a report-set file."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    schema = payload.get("schema")
    try:
        if schema == REPORT_SCHEMA:
            return [report_from_dict(payload["report"])]
        if schema == REPORT_SET_SCHEMA:
            return [report_from_dict(entry) for entry in payload["reports"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: malformed report body: {exc}") from exc
    raise SchemaError(f"{path}: unknown schema {schema!r}")
