"""Word-overlap evaluation metrics: BLEU (sentence and corpus), average-max
sentence BLEU for multi-reference sets, ROUGE-L, and a reduced METEOR.

All values are scaled to [0, 100]. The METEOR variant aligns unigrams by
exact match and then Porter-stem match only (no synonym or paraphrase
tables), and is called meteor_lite everywhere so it is never mistaken for
full METEOR.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .corpus import TokenSeq
from .errors import DataError
from .stem import stem

ROUGE_BETA = 1.2
METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5


@dataclass(frozen=True)
class MetricReport:
    """Named metric values (scaled to [0, 100]) with their configuration."""

    values: dict[str, float]
    config: dict
    n_items: int

    def to_dict(self) -> dict:
        return {"values": dict(self.values), "config": dict(self.config), "n_items": self.n_items}


def ngram_counts(tokens: TokenSeq, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _closest_ref_len(cand_len: int, references: list[TokenSeq]) -> int:
    # Closest reference length; ties go to the shorter reference.
    best = None
    for ref in references:
        diff = abs(len(ref) - cand_len)
        if best is None or diff < best[0] or (diff == best[0] and len(ref) < best[1]):
            best = (diff, len(ref))
    return best[1]


def _clipped_stats(
    candidate: TokenSeq, references: list[TokenSeq], max_n: int
) -> tuple[list[int], list[int]]:
    """Per-order clipped match counts and candidate n-gram totals."""
    correct = [0] * max_n
    total = [0] * max_n
    for n in range(1, max_n + 1):
        cand_counts = ngram_counts(candidate, n)
        if not cand_counts:
            continue
        max_ref: Counter = Counter()
        for ref in references:
            for gram, cnt in ngram_counts(ref, n).items():
                if cnt > max_ref[gram]:
                    max_ref[gram] = cnt
        total[n - 1] = sum(cand_counts.values())
        correct[n - 1] = sum(
            min(cnt, max_ref[gram]) for gram, cnt in cand_counts.items()
        )
    return correct, total


def _brevity_penalty(cand_len: int, ref_len: int) -> float:
    if cand_len == 0:
        return 0.0
    if cand_len < ref_len:
        return math.exp(1.0 - ref_len / cand_len)
    return 1.0


def _geometric_bleu(precisions: list[float], totals: list[int], bp: float) -> list[float]:
    """BLEU-k for k = 1..len(precisions) from per-order precisions in [0,1].

    Orders with no candidate n-grams at all (total 0) are excluded from the
    geometric mean, so identical short sentences still score 100; a zero
    precision at an order that does have n-grams zeroes the score.
    """
    values = []
    for k in range(1, len(precisions) + 1):
        usable = [precisions[i] for i in range(k) if totals[i] > 0]
        if not usable or min(usable) <= 0.0:
            values.append(0.0)
        else:
            log_mean = math.fsum(math.log(p) for p in usable) / len(usable)
            values.append(100.0 * bp * math.exp(log_mean))
    return values


def sentence_bleu(
    candidate: TokenSeq, references: list[TokenSeq], max_n: int = 4
) -> list[float]:
    """Sentence-level BLEU-1..max_n against one or more references.

    Zero precisions at orders >= 2 are floored to 1/(2c) so higher-order
    sentence scores stay usable; a zero unigram precision yields 0.
    """
    if not references:
        raise DataError("sentence_bleu needs at least one reference")
    c = len(candidate)
    if c == 0:
        return [0.0] * max_n
    correct, total = _clipped_stats(candidate, references, max_n)
    precisions = []
    for n in range(1, max_n + 1):
        if correct[n - 1] > 0:
            precisions.append(correct[n - 1] / total[n - 1])
        elif n > 1 and total[n - 1] > 0:
            precisions.append(1.0 / (2.0 * c))
        else:
            precisions.append(0.0)
    bp = _brevity_penalty(c, _closest_ref_len(c, references))
    return _geometric_bleu(precisions, total, bp)


def corpus_bleu(
    candidates: list[TokenSeq],
    references_per_item: list[list[TokenSeq]],
    max_n: int = 4,
) -> list[float]:
    """Corpus-level BLEU-1..max_n: clipped matches and totals are pooled over
    the whole corpus before computing precisions and the brevity penalty."""
    if len(candidates) != len(references_per_item):
        raise DataError("candidates and references must have equal length")
    if not candidates:
        raise DataError("corpus_bleu needs at least one item")
    correct = [0] * max_n
    total = [0] * max_n
    cand_len = 0
    ref_len = 0
    for cand, refs in zip(candidates, references_per_item):
        if not refs:
            raise DataError("every item needs at least one reference")
        item_correct, item_total = _clipped_stats(cand, refs, max_n)
        for i in range(max_n):
            correct[i] += item_correct[i]
            total[i] += item_total[i]
        cand_len += len(cand)
        ref_len += _closest_ref_len(len(cand), refs)
    precisions = [
        correct[i] / total[i] if total[i] > 0 else 0.0 for i in range(max_n)
    ]
    bp = _brevity_penalty(cand_len, ref_len)
    return _geometric_bleu(precisions, total, bp)


def avg_max_sentence_bleu(
    candidates: list[TokenSeq],
    references_per_item: list[list[TokenSeq]],
    max_n: int = 4,
) -> list[float]:
    """Per item, sentence BLEU against each reference separately; keep the
    per-order maximum; average over items."""
    if len(candidates) != len(references_per_item):
        raise DataError("candidates and references must have equal length")
    if not candidates:
        raise DataError("avg_max_sentence_bleu needs at least one item")
    sums = [0.0] * max_n
    for cand, refs in zip(candidates, references_per_item):
        if not refs:
            raise DataError("every item needs at least one reference")
        best = [0.0] * max_n
        for ref in refs:
            values = sentence_bleu(cand, [ref], max_n)
            for i in range(max_n):
                if values[i] > best[i]:
                    best[i] = values[i]
        for i in range(max_n):
            sums[i] += best[i]
    return [s / len(candidates) for s in sums]


def _lcs_length(a: TokenSeq, b: TokenSeq) -> int:
    # Iterative DP over a rolling row.
    prev = [0] * (len(b) + 1)
    for tok_a in a:
        row = [0]
        for j, tok_b in enumerate(b, 1):
            if tok_a == tok_b:
                row.append(prev[j - 1] + 1)
            else:
                row.append(max(prev[j], row[j - 1]))
        prev = row
    return prev[len(b)]


def rouge_l(candidate: TokenSeq, references: list[TokenSeq]) -> float:
    """ROUGE-L F-score (beta=1.2), maximum over references, scaled to [0,100]."""
    if not candidate or not references:
        raise DataError("rouge_l needs a candidate and at least one reference")
    beta_sq = ROUGE_BETA * ROUGE_BETA
    best = 0.0
    for ref in references:
        if not ref:
            raise DataError("rouge_l references must be non-empty")
        lcs = _lcs_length(candidate, ref)
        if lcs == 0:
            continue
        p = lcs / len(candidate)
        r = lcs / len(ref)
        f = (1.0 + beta_sq) * p * r / (r + beta_sq * p)
        if f > best:
            best = f
    return 100.0 * best


def _align(candidate: TokenSeq, reference: TokenSeq) -> tuple[int, int]:
    """Unigram alignment: exact matches first, Porter-stem matches on the
    leftovers; occurrences matched in order. Returns (matches, chunks)."""
    ref_used = [False] * len(reference)
    alignment: list[tuple[int, int]] = []
    cand_matched = [False] * len(candidate)

    def run_stage(key_fn):
        ref_keys = [key_fn(tok) for tok in reference]
        for i, tok in enumerate(candidate):
            if cand_matched[i]:
                continue
            key = key_fn(tok)
            for j, ref_key in enumerate(ref_keys):
                if not ref_used[j] and ref_key == key:
                    ref_used[j] = True
                    cand_matched[i] = True
                    alignment.append((i, j))
                    break

    run_stage(lambda tok: tok)
    run_stage(stem)

    if not alignment:
        return 0, 0
    alignment.sort()
    chunks = 1
    for (i0, j0), (i1, j1) in zip(alignment, alignment[1:]):
        if i1 != i0 + 1 or j1 != j0 + 1:
            chunks += 1
    return len(alignment), chunks


def meteor_lite(candidate: TokenSeq, references: list[TokenSeq]) -> float:
    """Exact+stem METEOR (alpha=0.9, beta=3, gamma=0.5), max over references,
    scaled to [0,100]. Zero matches give 0."""
    if not candidate or not references:
        raise DataError("meteor_lite needs a candidate and at least one reference")
    best = 0.0
    for ref in references:
        if not ref:
            raise DataError("meteor_lite references must be non-empty")
        matches, chunks = _align(candidate, ref)
        if matches == 0:
            continue
        p = matches / len(candidate)
        r = matches / len(ref)
        f_mean = p * r / (METEOR_ALPHA * p + (1.0 - METEOR_ALPHA) * r)
        penalty = METEOR_GAMMA * (chunks / matches) ** METEOR_BETA
        score = f_mean * (1.0 - penalty)
        if score > best:
            best = score
    return 100.0 * best
