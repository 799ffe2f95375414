"""In-memory flat vector index with exhaustive cosine search.

Vectors are unit-normalized, so cosine similarity is the plain dot
product. Search is exhaustive by design: corpora here are desk-scale and
exact, oracle-checkable results beat approximate speed. Ties are broken
by ascending passage id so rankings are reproducible.

Persistence is a directory with two files:
  passages.jsonl   one passage object per line
  vectors.bin      one JSON header line (dimension, rows, fingerprint,
                   dtype, byte_order), then row-major little-endian
                   float32 data
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .backends.base import EmbedBackend, RerankBackend
from .core import Passage, Query, RetrievedPassage
from .errors import BackendError, IngestError, ProtocolError, SchemaError, ValidationError

_VECTORS_FILE = "vectors.bin"
_PASSAGES_FILE = "passages.jsonl"


@dataclass(frozen=True)
class VectorIndex:
    passages: tuple[Passage, ...]
    vectors: np.ndarray
    dimension: int
    embedder_fingerprint: str

    def __post_init__(self):
        if self.vectors.shape != (len(self.passages), self.dimension):
            raise ValidationError(
                f"vector matrix shape {self.vectors.shape} does not match "
                f"{len(self.passages)} passages x dimension {self.dimension}"
            )
        norms = np.linalg.norm(self.vectors, axis=1)
        if self.passages and not np.allclose(norms, 1.0, atol=1e-6):
            worst = float(np.max(np.abs(norms - 1.0)))
            raise ValidationError(f"index rows are not unit vectors (max deviation {worst:.2e})")

    def __len__(self) -> int:
        return len(self.passages)


def _check_unique_ids(passages: Sequence[Passage]) -> None:
    counts = Counter(p.id for p in passages)
    duplicates = sorted(pid for pid, count in counts.items() if count > 1)
    if duplicates:
        raise IngestError(f"duplicate passage ids: {', '.join(duplicates)}")


def build_index(
    passages: Sequence[Passage],
    embed_backend: EmbedBackend,
    batch_size: int = 64,
) -> VectorIndex:
    """Embed all passages in batches and assemble the index."""
    if not passages:
        raise IngestError("cannot build an index from an empty passage list")
    _check_unique_ids(passages)
    batches = []
    for offset in range(0, len(passages), batch_size):
        chunk = passages[offset : offset + batch_size]
        try:
            batches.append(embed_backend.embed_batch([p.text for p in chunk]))
        except BackendError as exc:
            raise BackendError(
                f"embedding batch at offset {offset} failed: {exc}",
                endpoint=exc.endpoint,
                attempts=exc.attempts,
            ) from exc
        except ProtocolError as exc:
            raise ProtocolError(f"embedding batch at offset {offset} failed: {exc}") from exc
    vectors = np.vstack(batches)
    return VectorIndex(
        passages=tuple(passages),
        vectors=vectors,
        dimension=vectors.shape[1],
        embedder_fingerprint=embed_backend.fingerprint,
    )


def retrieve(
    index: VectorIndex,
    query: Query,
    k: int,
    embed_backend: EmbedBackend,
) -> list[RetrievedPassage]:
    """Top-min(k, corpus) passages by cosine, ties by ascending passage id."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    query_vector = embed_backend.embed_batch([query.text])[0]
    if query_vector.shape[0] != index.dimension:
        raise ProtocolError(
            f"query embedding dimension {query_vector.shape[0]} does not match "
            f"index dimension {index.dimension}"
        )
    scores = index.vectors @ query_vector
    order = sorted(range(len(index)), key=lambda i: (-scores[i], index.passages[i].id))
    top = order[: min(k, len(index))]
    return [
        RetrievedPassage(
            passage=index.passages[i],
            retrieval_score=float(scores[i]),
            rank=rank,
        )
        for rank, i in enumerate(top, start=1)
    ]


def rerank(
    query: Query,
    candidates: Sequence[RetrievedPassage],
    n: int,
    rerank_backend: RerankBackend,
) -> list[RetrievedPassage]:
    """Re-score every candidate, keep the top-min(n, all), reassign ranks."""
    if not candidates:
        raise ValidationError("rerank requires at least one candidate")
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    scores = rerank_backend.rerank_pairs(query.text, [c.passage.text for c in candidates])
    if len(scores) != len(candidates):
        raise ProtocolError(
            f"reranker returned {len(scores)} scores for {len(candidates)} candidates"
        )
    order = sorted(
        range(len(candidates)),
        key=lambda i: (-scores[i], candidates[i].passage.id),
    )
    top = order[: min(n, len(candidates))]
    return [
        replace(candidates[i], rerank_score=float(scores[i]), rank=rank)
        for rank, i in enumerate(top, start=1)
    ]


def save_index(index: VectorIndex, path: str | Path) -> None:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / _PASSAGES_FILE, "w", encoding="utf-8") as handle:
        for passage in index.passages:
            row: dict = {"id": passage.id, "text": passage.text}
            if passage.title is not None:
                row["title"] = passage.title
            if passage.lang is not None:
                row["lang"] = passage.lang
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
    header = {
        "dimension": index.dimension,
        "rows": len(index),
        "fingerprint": index.embedder_fingerprint,
        "dtype": "float32",
        "byte_order": "little",
    }
    with open(directory / _VECTORS_FILE, "wb") as handle:
        handle.write(json.dumps(header).encode("utf-8") + b"\n")
        handle.write(index.vectors.astype("<f4").tobytes(order="C"))


def load_index(path: str | Path) -> VectorIndex:
    directory = Path(path)
    vectors_path = directory / _VECTORS_FILE
    passages_path = directory / _PASSAGES_FILE
    if not vectors_path.exists() or not passages_path.exists():
        raise IngestError(f"{directory} is not an index directory (missing index files)")

    with open(vectors_path, "rb") as handle:
        header_line = handle.readline()
        blob = handle.read()
    try:
        header = json.loads(header_line)
        dimension, rows = header["dimension"], header["rows"]
        if header["dtype"] != "float32" or header["byte_order"] != "little":
            raise SchemaError(f"unsupported vector encoding: {header}")
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemaError(f"malformed vector header in {vectors_path}") from exc
    expected = rows * dimension * 4
    if len(blob) != expected:
        raise SchemaError(
            f"vector blob in {vectors_path} has {len(blob)} bytes, expected {expected}"
        )
    matrix = np.frombuffer(blob, dtype="<f4").reshape(rows, dimension).astype(np.float64)
    # float32 storage nudges norms off 1.0; renormalize so search stays exact
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    matrix = matrix / norms

    passages = []
    with open(passages_path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                passages.append(
                    Passage(
                        id=str(row["id"]),
                        text=row["text"],
                        title=row.get("title"),
                        lang=row.get("lang"),
                    )
                )
            except (ValueError, KeyError, TypeError, ValidationError) as exc:
                raise IngestError(f"{passages_path}:{lineno}: bad passage row: {exc}") from exc
    if len(passages) != rows:
        raise SchemaError(
            f"index mismatch: {len(passages)} passages but {rows} vector rows"
        )
    return VectorIndex(
        passages=tuple(passages),
        vectors=matrix,
        dimension=dimension,
        embedder_fingerprint=header["fingerprint"],
    )
