"""Independent reference implementations the real code is checked against.

These stay deliberately naive: explicit double loops and Python-level
sums, no shared helpers with the package. If the fast paths and these
ever disagree, the fast paths are wrong.
"""
from __future__ import annotations

import unicodedata

from xlrag.errors import MetricError


def brute_force_trigram_recall(gold: str, prediction: str) -> float:
    """Recall by explicit enumeration of gold trigrams and prediction windows."""
    gold = unicodedata.normalize("NFC", gold.strip())
    prediction = unicodedata.normalize("NFC", prediction.strip())
    if gold == "":
        raise MetricError("gold answer is empty after trimming")
    if len(gold) < 3:
        width = len(gold)
        for j in range(len(prediction) - width + 1):
            if prediction[j : j + width] == gold:
                return 1.0
        return 0.0
    trigrams: list[str] = []
    for i in range(len(gold) - 2):
        trigram = gold[i : i + 3]
        if trigram not in trigrams:
            trigrams.append(trigram)
    hits = 0
    for trigram in trigrams:
        for j in range(len(prediction) - 2):
            if prediction[j : j + 3] == trigram:
                hits += 1
                break
    return hits / len(trigrams)


def exhaustive_retrieve(passage_ids, vectors, query_vector, k):
    """(id, score) pairs for the top-k by cosine; plain Python arithmetic.

    ``vectors`` is a sequence of row sequences aligned with passage_ids.
    """
    scored = []
    for pid, row in zip(passage_ids, vectors):
        score = 0.0
        for a, b in zip(row, query_vector):
            score += float(a) * float(b)
        scored.append((pid, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[: min(k, len(scored))]
