"""Embedding-based similarity metrics over externally supplied word vectors.

Vectors come from a word2vec-style text file ("token v1 v2 ... vd"). Tokens
missing from the table are skipped; when one side of a comparison has no
in-vocabulary token at all the item is skipped (callers count the skips).
Functions return raw cosines in [-1, 1]; reports scale them by 100.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import TokenSeq
from .errors import DataError

log = logging.getLogger(__name__)


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load a word2vec-style text embedding file.

    The dimension is fixed by the first line; later lines with a different
    dimension raise DataError naming the line. Duplicate tokens keep the last
    occurrence (a warning is logged).
    """
    vectors: dict[str, np.ndarray] = {}
    dimension = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if len(parts) < 2:
                raise DataError(f"line {lineno}: expected token and vector values")
            token = parts[0]
            try:
                values = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"line {lineno}: non-numeric vector value") from exc
            if dimension is None:
                dimension = len(values)
            elif len(values) != dimension:
                raise DataError(
                    f"line {lineno}: dimension {len(values)} != {dimension}"
                )
            if token in vectors:
                log.warning("duplicate embedding for %r (line %d); keeping last", token, lineno)
            vectors[token] = values
    if dimension is None:
        raise DataError("embedding file is empty")
    return EmbeddingTable(dimension=dimension, vectors=vectors)


def _in_vocab(tokens: TokenSeq, table: EmbeddingTable) -> list[np.ndarray]:
    return [table.vectors[tok] for tok in tokens if tok in table.vectors]


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    norm = float(np.linalg.norm(a) * np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return float(np.dot(a, b) / norm)


def embedding_average(
    candidate: TokenSeq, reference: TokenSeq, table: EmbeddingTable
) -> float | None:
    """Cosine of the mean word vectors; None when a side is fully out of vocabulary."""
    cand = _in_vocab(candidate, table)
    ref = _in_vocab(reference, table)
    if not cand or not ref:
        return None
    return _cosine(np.mean(cand, axis=0), np.mean(ref, axis=0))


def extrema_vector(vectors: list[np.ndarray]) -> np.ndarray:
    """Per dimension, the value of largest absolute magnitude (sign kept)."""
    stacked = np.stack(vectors)
    idx = np.argmax(np.abs(stacked), axis=0)
    return stacked[idx, np.arange(stacked.shape[1])]


def vector_extrema(
    candidate: TokenSeq, reference: TokenSeq, table: EmbeddingTable
) -> float | None:
    cand = _in_vocab(candidate, table)
    ref = _in_vocab(reference, table)
    if not cand or not ref:
        return None
    return _cosine(extrema_vector(cand), extrema_vector(ref))


def greedy_matching(
    candidate: TokenSeq, reference: TokenSeq, table: EmbeddingTable
) -> float | None:
    """Symmetrized mean of best per-token cosines between the two sides."""
    cand = _in_vocab(candidate, table)
    ref = _in_vocab(reference, table)
    if not cand or not ref:
        return None

    def directed(src: list[np.ndarray], dst: list[np.ndarray]) -> float:
        return float(
            np.mean([max(_cosine(v, w) for w in dst) for v in src])
        )

    return 0.5 * (directed(cand, ref) + directed(ref, cand))


def max_over_references(metric_fn, candidate: TokenSeq, references: list[TokenSeq], table: EmbeddingTable) -> float | None:
    """Multi-reference variant: maximum metric value over the references."""
    values = [metric_fn(candidate, ref, table) for ref in references]
    values = [v for v in values if v is not None]
    return max(values) if values else None
