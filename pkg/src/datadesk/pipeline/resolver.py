"""Data-need resolution: score registered dataset descriptions against a
natural-language need by token-overlap TF-IDF cosine."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import NoDatasetMatch
from ..ml.features import tokenize_text
from ..store.registry import Registry

MATCH_FLOOR = 0.05


@dataclass(frozen=True)
class ResolvedData:
    name: str
    score: float
    runner_up: tuple[str, float] | None


def _tf(tokens: list[str]) -> dict[str, float]:
    counts: dict[str, float] = {}
    for t in tokens:
        counts[t] = counts.get(t, 0.0) + 1.0
    return counts


def _cosine(a: dict[str, float], b: dict[str, float]) -> float:
    dot = sum(w * b.get(t, 0.0) for t, w in a.items())
    norm_a = math.sqrt(sum(w * w for w in a.values()))
    norm_b = math.sqrt(sum(w * w for w in b.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (norm_a * norm_b)


def score_descriptions(need: str, registry: Registry) -> list[tuple[str, float]]:
    """Cosine score per dataset, in registration order."""
    descriptors = registry.descriptors()
    docs = [tokenize_text(d.description) for d in descriptors]
    n = len(docs)
    df: dict[str, int] = {}
    for tokens in docs:
        for t in set(tokens):
            df[t] = df.get(t, 0) + 1
    idf = {t: math.log((1 + n) / (1 + f)) + 1.0 for t, f in df.items()}

    def weigh(tokens: list[str]) -> dict[str, float]:
        return {t: c * idf[t] for t, c in _tf(tokens).items() if t in idf}

    need_vec = weigh(tokenize_text(need))
    return [(d.name, _cosine(need_vec, weigh(doc))) for d, doc in zip(descriptors, docs)]


def resolve_data(need: str, registry: Registry) -> ResolvedData:
    """Best-matching dataset for a data need; ties break by registration order.

    Raises NoDatasetMatch (listing the top 3 candidates) when the best score
    falls below the 0.05 floor.
    """
    scores = score_descriptions(need, registry)
    if not scores:
        raise NoDatasetMatch(need, [])
    ranked = sorted(enumerate(scores), key=lambda e: (-e[1][1], e[0]))
    best_name, best_score = ranked[0][1]
    if best_score < MATCH_FLOOR:
        raise NoDatasetMatch(need, [s for _, s in ranked[:3]])
    runner_up = ranked[1][1] if len(ranked) > 1 else None
    return ResolvedData(best_name, best_score, runner_up)
