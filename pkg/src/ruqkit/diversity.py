"""Lexical diversity: pooled n-gram type/token ratios over system responses."""

from __future__ import annotations

from .corpus import TokenSeq
from .errors import DataError
from .overlap_metrics import ngram_counts

DEFAULT_ORDERS = (1, 2, 3)


def distinct_n(responses: list[TokenSeq], n: int) -> float:
    """100 * unique n-grams / total n-grams, pooled across all responses.

    Responses shorter than n contribute nothing; an empty pool gives 0.
    """
    if n < 1:
        raise DataError("n must be >= 1")
    unique = set()
    total = 0
    for response in responses:
        counts = ngram_counts(response, n)
        unique.update(counts)
        total += sum(counts.values())
    if total == 0:
        return 0.0
    return 100.0 * len(unique) / total
