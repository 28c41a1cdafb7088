"""Scorer contract and length-normalized candidate scores.

A scorer assigns token-level conditional log-probabilities (natural log) to
a candidate response given a prompt. The length-normalized score of a
candidate is the arithmetic mean of its per-token log-probabilities, with
the end-of-sequence marker scored and counted like any other token.

Externally produced scores (e.g. from a neural model) enter through JSONL
score files; one record per (pair, candidate):

    {"pair_id": 12, "label": "generic:I don't know.",
     "tokens": ["i", "don", "'t", "know", ".", "</s>"],
     "logprobs": [-1.2, ...]}
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .corpus import END_MARKER, TokenSeq, validate_token_seq
from .errors import DataError

LABEL_REFERENCE = "reference"
LABEL_DECODED = "decoded"
_GENERIC_PREFIX = "generic:"


def generic_label(name: str) -> str:
    return _GENERIC_PREFIX + name


def is_generic_label(label: str) -> bool:
    return label.startswith(_GENERIC_PREFIX)


def generic_name(label: str) -> str:
    if not is_generic_label(label):
        raise ValueError(f"not a generic label: {label}")
    return label[len(_GENERIC_PREFIX):]


def _valid_label(label: str) -> bool:
    return label in (LABEL_REFERENCE, LABEL_DECODED) or (
        is_generic_label(label) and len(label) > len(_GENERIC_PREFIX)
    )


@dataclass(frozen=True)
class ScorerConfig:
    """Scoring conventions; fixed for this toolkit and echoed into reports."""

    include_end_marker: bool = True
    log_base: str = "e"

    def __post_init__(self) -> None:
        if not self.include_end_marker:
            raise DataError("include_end_marker is fixed to true")


class TokenScorer(Protocol):
    """Anything that scores the next token of a response given its prompt.

    ``lowercase`` records the tokenization convention the scorer expects, so
    callers can tokenize prompts and candidates consistently.
    """

    lowercase: bool

    def token_logprob(self, prompt: TokenSeq, prefix: TokenSeq, token: str) -> float:
        """ln P(token | prompt, prefix). Never -inf."""
        ...


@dataclass(frozen=True)
class ScoredCandidate:
    """A candidate token sequence with its per-token log-probabilities.

    ``normalized_score`` is always recomputed from ``token_logprobs``; there
    is no separately stored value to drift out of sync.
    """

    pair_id: int
    label: str
    tokens: TokenSeq
    token_logprobs: list[float] = field(repr=False)

    def __post_init__(self) -> None:
        if not _valid_label(self.label):
            raise DataError(f"pair {self.pair_id}: invalid label {self.label!r}")
        if not isinstance(self.tokens, list) or not isinstance(self.token_logprobs, list):
            raise DataError(f"pair {self.pair_id}: tokens and logprobs must be arrays")
        try:
            validate_token_seq(self.tokens)
        except DataError as exc:
            raise DataError(f"pair {self.pair_id}: {exc}") from exc
        if len(self.tokens) == 0:
            raise DataError(f"pair {self.pair_id}: empty candidate")
        if len(self.tokens) != len(self.token_logprobs):
            raise DataError(f"pair {self.pair_id}: length mismatch")
        for lp in self.token_logprobs:
            if not isinstance(lp, (int, float)) or math.isnan(lp):
                raise DataError(f"pair {self.pair_id}: logprobs must be numbers")
            if lp > 0:
                raise DataError(f"pair {self.pair_id}: positive logprob {lp}")

    @property
    def normalized_score(self) -> float:
        return normalized_score(self.token_logprobs)


def normalized_score(token_logprobs: list[float]) -> float:
    """Arithmetic mean of the per-token log-probabilities.

    Computed with exact rational arithmetic and rounded once
    (statistics.mean), so candidates whose true means are equal, e.g. under
    a uniform scorer, compare as exact ties regardless of length.
    """
    if not token_logprobs:
        raise DataError("cannot normalize an empty log-probability list")
    return float(statistics.mean(token_logprobs))


def score_tokens(
    scorer: TokenScorer,
    prompt: TokenSeq,
    candidate: TokenSeq,
    pair_id: int = 0,
    label: str = LABEL_REFERENCE,
) -> ScoredCandidate:
    """Score every token of ``candidate`` (which must end with the end marker)."""
    validate_token_seq(candidate, require_end=True)
    logprobs = [
        scorer.token_logprob(prompt, candidate[:i], candidate[i])
        for i in range(len(candidate))
    ]
    return ScoredCandidate(
        pair_id=pair_id, label=label, tokens=list(candidate), token_logprobs=logprobs
    )


class UniformScorer:
    """Assigns every token the same probability 1/vocab_size. Baseline / testing."""

    def __init__(self, vocab_size: int, lowercase: bool = True):
        if vocab_size < 1:
            raise DataError("vocab_size must be >= 1")
        self.vocab_size = vocab_size
        self.lowercase = lowercase
        self._logprob = -math.log(vocab_size)

    def token_logprob(self, prompt: TokenSeq, prefix: TokenSeq, token: str) -> float:
        return self._logprob


def read_score_file(path: str | Path) -> list[ScoredCandidate]:
    """Read and validate a JSONL score file.

    Any stored normalized score is ignored; scores are recomputed from the
    log-probabilities on access.
    """
    out: list[ScoredCandidate] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                raise DataError(f"line {lineno}: blank line")
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            for key in ("pair_id", "label", "tokens", "logprobs"):
                if key not in record:
                    raise DataError(f"line {lineno}: missing field {key}")
            pair_id = record["pair_id"]
            if isinstance(pair_id, bool) or not isinstance(pair_id, int) or pair_id < 0:
                raise DataError(f"line {lineno}: pair_id must be a non-negative integer")
            if not isinstance(record["tokens"], list) or not isinstance(record["logprobs"], list):
                raise DataError(f"pair {pair_id}: tokens and logprobs must be arrays")
            logprobs = []
            for x in record["logprobs"]:
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise DataError(f"pair {pair_id}: logprobs must be numbers")
                logprobs.append(float(x))
            out.append(
                ScoredCandidate(
                    pair_id=pair_id,
                    label=record["label"],
                    tokens=record["tokens"],
                    token_logprobs=logprobs,
                )
            )
    return out


def write_score_file(candidates: list[ScoredCandidate], path: str | Path) -> None:
    """Write candidates in the JSONL score-file format (round-trips with read)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for cand in candidates:
            record = {
                "pair_id": cand.pair_id,
                "label": cand.label,
                "tokens": cand.tokens,
                "logprobs": cand.token_logprobs,
                "normalized_score": cand.normalized_score,
            }
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")
