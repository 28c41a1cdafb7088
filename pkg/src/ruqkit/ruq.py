"""Relative Utterance Quantity: does the model prefer its reference over a
generic response?

For every (prompt, reference) pair the length-normalized model score of the
reference is compared against the score of each generic response (strict >;
ties count as not preferred). The RUQ score is the percentage of pairs where
the reference wins. Per-token-position averages of the same log-probabilities
form the plot series.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

from .corpus import DialogPair, TokenSeq, tokenize, with_end_marker
from .errors import DataError
from .scorer import (
    LABEL_DECODED,
    LABEL_REFERENCE,
    ScoredCandidate,
    TokenScorer,
    generic_label,
    generic_name,
    is_generic_label,
    score_tokens,
)

# The two generic responses used by default; any other set can be supplied.
DEFAULT_GENERICS = ("I don't know.", "I don't know what to do.")


@dataclass(frozen=True)
class GenericResponse:
    """A generic response to diagnose against, e.g. "I don't know."."""

    text: str
    name: str = ""

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise DataError("generic response text must be non-empty")
        if not self.name:
            object.__setattr__(self, "name", self.text)


def default_generics() -> list[GenericResponse]:
    return [GenericResponse(text) for text in DEFAULT_GENERICS]


@dataclass(frozen=True)
class RuqComparison:
    """Score comparison for one pair: reference vs. each generic."""

    pair_id: int
    ref_score: float
    generic_scores: dict[str, float]
    reference_preferred: dict[str, bool]


@dataclass(frozen=True)
class RuqReport:
    split: str
    n_pairs: int
    ruq_percent: dict[str, float]
    comparisons: list[RuqComparison] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "split": self.split,
            "n_pairs": self.n_pairs,
            "ruq_percent": dict(self.ruq_percent),
            "comparisons": [
                {
                    "pair_id": c.pair_id,
                    "ref_score": c.ref_score,
                    "generic_scores": dict(c.generic_scores),
                    "reference_preferred": dict(c.reference_preferred),
                }
                for c in self.comparisons
            ],
        }


class PlotPoint(NamedTuple):
    position: int  # 1-based token position
    mean_logprob: float
    count: int


@dataclass(frozen=True)
class PlotSeries:
    label: str
    points: list[PlotPoint]


@dataclass(frozen=True)
class DecodeConfig:
    beam: int = 5
    max_len: int = 20


def _generic_token_cache(
    generics: list[GenericResponse], lowercase: bool
) -> list[tuple[GenericResponse, TokenSeq]]:
    # Tokenized once per run, not once per pair.
    return [(g, with_end_marker(tokenize(g.text, lowercase))) for g in generics]


def compare_pair(
    scorer: TokenScorer, pair: DialogPair, generics: list[GenericResponse]
) -> RuqComparison:
    """Compare one pair's reference against each generic (strict >)."""
    cands = _score_pair(scorer, pair, _generic_token_cache(generics, scorer.lowercase))
    return _comparison_from_scores(
        pair.id,
        ref_score=cands[0].normalized_score,
        generic_scores={
            generic_name(c.label): c.normalized_score for c in cands[1:]
        },
    )


def _comparison_from_scores(
    pair_id: int, ref_score: float, generic_scores: dict[str, float]
) -> RuqComparison:
    return RuqComparison(
        pair_id=pair_id,
        ref_score=ref_score,
        generic_scores=generic_scores,
        reference_preferred={
            name: ref_score > score for name, score in generic_scores.items()
        },
    )


def _score_pair(
    scorer: TokenScorer,
    pair: DialogPair,
    generic_tokens: list[tuple[GenericResponse, TokenSeq]],
    decode_config: DecodeConfig | None = None,
) -> list[ScoredCandidate]:
    """Score reference, generics, and optionally the beam-decoded output."""
    prompt = tokenize(pair.prompt, scorer.lowercase)
    out = [
        score_tokens(
            scorer,
            prompt,
            with_end_marker(tokenize(pair.response, scorer.lowercase)),
            pair_id=pair.id,
            label=LABEL_REFERENCE,
        )
    ]
    for g, toks in generic_tokens:
        out.append(
            score_tokens(scorer, prompt, toks, pair_id=pair.id, label=generic_label(g.name))
        )
    if decode_config is not None:
        from .ngram import beam_decode  # scorer must support decoding

        decoded = beam_decode(
            scorer, prompt, beam=decode_config.beam, max_len=decode_config.max_len
        )
        out.append(
            score_tokens(scorer, prompt, decoded, pair_id=pair.id, label=LABEL_DECODED)
        )
    return out


def _map_pairs(fn, pairs, jobs: int):
    if jobs <= 1:
        return [fn(p) for p in pairs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, pairs))  # map preserves pair order


def score_corpus(
    scorer: TokenScorer,
    pairs: list[DialogPair],
    generics: list[GenericResponse] | None = None,
    decode_config: DecodeConfig | None = None,
    jobs: int = 1,
) -> list[ScoredCandidate]:
    """Score reference, generics, and optionally the decoded output for every
    pair, in pair order (candidates grouped per pair)."""
    if not pairs:
        raise DataError("cannot score an empty corpus")
    generics = list(generics) if generics is not None else default_generics()
    cache = _generic_token_cache(generics, scorer.lowercase)

    def one(pair: DialogPair) -> list[ScoredCandidate]:
        return _score_pair(scorer, pair, cache, decode_config)

    return [c for cands in _map_pairs(one, pairs, jobs) for c in cands]


def ruq_score(
    scorer: TokenScorer,
    pairs: list[DialogPair],
    generics: list[GenericResponse] | None = None,
    split: str = "train",
    jobs: int = 1,
) -> RuqReport:
    """RUQ over a corpus: percentage of pairs whose reference outscores each
    generic. Reductions run in pair order, so the result does not depend on
    ``jobs``."""
    if not pairs:
        raise DataError("cannot compute RUQ on an empty corpus")
    generics = list(generics) if generics is not None else default_generics()
    cache = _generic_token_cache(generics, scorer.lowercase)

    def one(pair: DialogPair) -> RuqComparison:
        cands = _score_pair(scorer, pair, cache)
        return _comparison_from_scores(
            pair.id,
            cands[0].normalized_score,
            {generic_name(c.label): c.normalized_score for c in cands[1:]},
        )

    comparisons = _map_pairs(one, pairs, jobs)
    return report_from_comparisons(comparisons, split)


def report_from_comparisons(comparisons: list[RuqComparison], split: str) -> RuqReport:
    if not comparisons:
        raise DataError("cannot compute RUQ without comparisons")
    names = list(comparisons[0].reference_preferred)
    for comp in comparisons:
        if list(comp.reference_preferred) != names:
            raise DataError(
                f"pair {comp.pair_id}: generic set differs from the rest of the corpus"
            )
    n = len(comparisons)
    percent = {
        name: 100.0 * sum(c.reference_preferred[name] for c in comparisons) / n
        for name in names
    }
    return RuqReport(split=split, n_pairs=n, ruq_percent=percent, comparisons=comparisons)


def comparisons_from_candidates(candidates: list[ScoredCandidate]) -> list[RuqComparison]:
    """Build per-pair comparisons from score-file records.

    Each pair needs one reference record plus one record per generic; decoded
    records are ignored here. Candidates are never re-tokenized.
    """
    by_pair: dict[int, dict[str, float]] = {}
    order: list[int] = []
    for cand in candidates:
        scores = by_pair.get(cand.pair_id)
        if scores is None:
            scores = by_pair[cand.pair_id] = {}
            order.append(cand.pair_id)
        if cand.label in scores:
            raise DataError(f"pair {cand.pair_id}: duplicate label {cand.label}")
        scores[cand.label] = cand.normalized_score

    comparisons = []
    for pair_id in order:
        scores = by_pair[pair_id]
        if LABEL_REFERENCE not in scores:
            raise DataError(f"pair {pair_id}: no reference record in score file")
        generic_scores = {
            generic_name(label): value
            for label, value in scores.items()
            if is_generic_label(label)
        }
        if not generic_scores:
            raise DataError(f"pair {pair_id}: no generic records in score file")
        comparisons.append(
            _comparison_from_scores(pair_id, scores[LABEL_REFERENCE], generic_scores)
        )
    return comparisons


def plot_series(
    scorer: TokenScorer,
    pairs: list[DialogPair],
    generics: list[GenericResponse] | None = None,
    decode_config: DecodeConfig | None = None,
    max_position: int = 20,
    jobs: int = 1,
) -> list[PlotSeries]:
    """Per-token-position mean log-probabilities, one series per candidate
    kind (reference, decoded output if requested, each generic)."""
    if max_position < 1:
        raise DataError("max_position must be >= 1")
    candidates = score_corpus(scorer, pairs, generics, decode_config, jobs)
    return series_from_candidates(candidates, max_position)


def series_from_candidates(
    candidates: list[ScoredCandidate], max_position: int = 20
) -> list[PlotSeries]:
    """Group scored candidates by label and average log-probabilities at each
    token position; position i uses only candidates of length >= i."""
    if max_position < 1:
        raise DataError("max_position must be >= 1")
    sums: dict[str, list[float]] = {}
    counts: dict[str, list[int]] = {}
    order: list[str] = []
    for cand in candidates:
        if cand.label not in sums:
            sums[cand.label] = [0.0] * max_position
            counts[cand.label] = [0] * max_position
            order.append(cand.label)
        for i, lp in enumerate(cand.token_logprobs[:max_position]):
            sums[cand.label][i] += lp
            counts[cand.label][i] += 1

    ordered = sorted(order, key=_label_sort_key)
    series = []
    for label in ordered:
        points = [
            PlotPoint(position=i + 1, mean_logprob=sums[label][i] / n, count=n)
            for i, n in enumerate(counts[label])
            if n >= 1
        ]
        series.append(PlotSeries(label=label, points=points))
    return series


def _label_sort_key(label: str) -> tuple[int, str]:
    if label == LABEL_REFERENCE:
        return (0, label)
    if label == LABEL_DECODED:
        return (1, label)
    return (2, label)
