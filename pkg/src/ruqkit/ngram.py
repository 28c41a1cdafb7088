"""Interpolated n-gram conditional scorer with beam-search decoding.

The model scores a response given a prompt by treating the pair as one
sequence ``prompt-tokens <sep> response-tokens </s>`` and estimating
next-token probabilities by Jelinek-Mercer interpolation over orders
1..n plus a uniform floor:

    P(t | ctx) ~ sum_k lambda_k * P_ML(t | last k-1 context tokens)
                 + lambda_0 / |V|

P_ML of an unseen event is 0. Orders whose context was never observed
contribute no mass, so the raw sum is renormalized by the total assignable
mass for the context; this keeps the distribution proper for every context
(sum over the vocabulary is exactly 1). With lambda_0 > 0 no token ever
receives probability 0, so log-probabilities are finite and bounded below
by ``floor_logprob``.

Tokens with training frequency below ``min_count`` are replaced by the
unknown-token marker; unknown tokens at scoring time are mapped the same
way.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import END_MARKER, SEP_MARKER, UNK_MARKER, DialogPair, TokenSeq, tokenize
from .errors import DataError
from .scorer import normalized_score

FORMAT_VERSION = 1
DEFAULT_LAMBDA0 = 0.05


def default_lambdas(order: int, lambda0: float = DEFAULT_LAMBDA0) -> list[float]:
    """Uniform weights over orders 1..n plus ``lambda0`` on the uniform floor."""
    if order < 1:
        raise DataError("order must be >= 1")
    if not 0.0 < lambda0 < 1.0:
        raise DataError("lambda0 must be in (0, 1)")
    return [lambda0] + [(1.0 - lambda0) / order] * order


@dataclass
class NGramModel:
    """Trained n-gram scorer. Immutable after training; safe to share."""

    order: int
    lambdas: list[float]
    vocab: set[str]
    counts: dict[int, dict[tuple[str, ...], Counter]]
    totals: dict[int, dict[tuple[str, ...], int]] = field(repr=False)
    min_count: int = 1
    lowercase: bool = True

    def __post_init__(self) -> None:
        if self.order < 1:
            raise DataError("order must be >= 1")
        if len(self.lambdas) != self.order + 1:
            raise DataError("need one lambda per order 1..n plus lambda_0")
        if any(lam < 0 for lam in self.lambdas):
            raise DataError("lambdas must be non-negative")
        if abs(sum(self.lambdas) - 1.0) > 1e-12:
            raise DataError("lambdas must sum to 1")
        if self.lambdas[0] <= 0:
            raise DataError("lambda_0 must be positive")
        for marker in (UNK_MARKER, SEP_MARKER, END_MARKER):
            if marker not in self.vocab:
                raise DataError(f"vocab must contain {marker}")
        self._sorted_vocab = sorted(self.vocab)

    @property
    def floor_logprob(self) -> float:
        """Smallest log-probability the model can assign: ln(lambda_0 / |V|)."""
        return math.log(self.lambdas[0] / len(self.vocab))

    def map_token(self, token: str) -> str:
        return token if token in self.vocab else UNK_MARKER

    def _context_mass(self, context: TokenSeq):
        """Per-order (lambda, counter, total) for the seen orders, plus the
        total assignable mass for this context."""
        mapped = [self.map_token(t) for t in context]
        seen = []
        mass = self.lambdas[0]
        for k in range(1, self.order + 1):
            lam = self.lambdas[k]
            if lam == 0.0:
                continue
            ctx = tuple(mapped[len(mapped) - (k - 1):]) if k > 1 else ()
            total = self.totals.get(k, {}).get(ctx)
            if total:
                seen.append((lam, self.counts[k][ctx], total))
                mass += lam
        return seen, mass

    def logprob(self, context: TokenSeq, token: str) -> float:
        """ln P(token | context). Finite for every token."""
        tok = self.map_token(token)
        seen, mass = self._context_mass(context)
        p = self.lambdas[0] / len(self.vocab)
        for lam, counter, total in seen:
            cnt = counter.get(tok)
            if cnt:
                p += lam * cnt / total
        return max(math.log(p / mass), self.floor_logprob)

    def next_logprobs(self, context: TokenSeq) -> list[tuple[str, float]]:
        """The full next-token distribution, sorted by token."""
        seen, mass = self._context_mass(context)
        base = self.lambdas[0] / len(self.vocab)
        acc = dict.fromkeys(self._sorted_vocab, base)
        for lam, counter, total in seen:
            scale = lam / total
            for tok, cnt in counter.items():
                acc[tok] += scale * cnt
        floor = self.floor_logprob
        return [(tok, max(math.log(acc[tok] / mass), floor)) for tok in self._sorted_vocab]

    # TokenScorer contract
    def token_logprob(self, prompt: TokenSeq, prefix: TokenSeq, token: str) -> float:
        return self.logprob(list(prompt) + [SEP_MARKER] + list(prefix), token)


def train(
    pairs: list[DialogPair],
    order: int,
    min_count: int = 1,
    lowercase: bool = True,
    lambdas: list[float] | None = None,
) -> NGramModel:
    """Count n-grams of orders 1..n over every ``prompt <sep> response </s>``
    sequence. Deterministic: identical corpora give identical models."""
    if not pairs:
        raise DataError("cannot train on an empty corpus")
    if order < 1:
        raise DataError("order must be >= 1")
    if min_count < 1:
        raise DataError("min_count must be >= 1")
    lambdas = list(lambdas) if lambdas is not None else default_lambdas(order)

    tokenized = [
        (tokenize(p.prompt, lowercase), tokenize(p.response, lowercase)) for p in pairs
    ]
    freq: Counter = Counter()
    for prompt_toks, response_toks in tokenized:
        freq.update(prompt_toks)
        freq.update(response_toks)

    kept = {tok for tok, n in freq.items() if n >= min_count}
    vocab = kept | {UNK_MARKER, SEP_MARKER, END_MARKER}

    counts: dict[int, dict[tuple[str, ...], Counter]] = {k: {} for k in range(1, order + 1)}
    for prompt_toks, response_toks in tokenized:
        seq = (
            [t if t in kept else UNK_MARKER for t in prompt_toks]
            + [SEP_MARKER]
            + [t if t in kept else UNK_MARKER for t in response_toks]
            + [END_MARKER]
        )
        for i, tok in enumerate(seq):
            for k in range(1, order + 1):
                ctx = tuple(seq[max(0, i - (k - 1)):i])
                table = counts[k]
                if ctx not in table:
                    table[ctx] = Counter()
                table[ctx][tok] += 1

    totals = {
        k: {ctx: sum(counter.values()) for ctx, counter in table.items()}
        for k, table in counts.items()
    }
    return NGramModel(
        order=order,
        lambdas=lambdas,
        vocab=vocab,
        counts=counts,
        totals=totals,
        min_count=min_count,
        lowercase=lowercase,
    )


def beam_decode(
    model: NGramModel, prompt: TokenSeq, beam: int = 5, max_len: int = 20
) -> TokenSeq:
    """Beam search over next-token log-probabilities.

    Partial hypotheses compete by cumulative log-probability (ties broken
    lexicographically by token sequence); a hypothesis finishes when the end
    marker enters the beam or at ``max_len`` (end marker then appended and
    scored). The best finished hypothesis by length-normalized score wins.
    With beam=1 this is greedy argmax decoding.
    """
    if beam < 1:
        raise DataError("beam must be >= 1")
    if max_len < 1:
        raise DataError("max_len must be >= 1")

    base_context = [model.map_token(t) for t in prompt] + [SEP_MARKER]
    # hypothesis: (tokens, logprobs, cumulative sum)
    active: list[tuple[tuple[str, ...], tuple[float, ...], float]] = [((), (), 0.0)]
    finished: list[tuple[tuple[str, ...], tuple[float, ...]]] = []

    while active:
        pool = []
        for toks, lps, cum in active:
            for tok, lp in model.next_logprobs(base_context + list(toks)):
                pool.append((cum + lp, toks + (tok,), lps + (lp,)))
        pool.sort(key=lambda entry: (-entry[0], entry[1]))
        active = []
        for cum, toks, lps in pool[:beam]:
            if toks[-1] == END_MARKER:
                finished.append((toks, lps))
            elif len(toks) >= max_len:
                lp_end = model.logprob(base_context + list(toks), END_MARKER)
                finished.append((toks + (END_MARKER,), lps + (lp_end,)))
            else:
                active.append((toks, lps, cum))

    best = min(
        finished,
        key=lambda hyp: (-normalized_score(list(hyp[1])), hyp[0]),
    )
    return list(best[0])


def save_model(model: NGramModel, path: str | Path) -> None:
    """Persist to JSON. Deterministic byte output for a given model."""
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": "ngram-jm",
        "order": model.order,
        "lambdas": model.lambdas,
        "min_count": model.min_count,
        "lowercase": model.lowercase,
        "vocab": sorted(model.vocab),
        "counts": {
            str(k): {
                " ".join(ctx): dict(sorted(counter.items()))
                for ctx, counter in sorted(table.items())
            }
            for k, table in model.counts.items()
        },
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_model(path: str | Path) -> NGramModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid model file: {exc.msg}") from exc
    if not isinstance(payload, dict) or payload.get("kind") != "ngram-jm":
        raise DataError("not an n-gram model file")
    if payload.get("format_version") != FORMAT_VERSION:
        raise DataError(f"unsupported model format version: {payload.get('format_version')}")
    counts: dict[int, dict[tuple[str, ...], Counter]] = {}
    for k_str, table in payload["counts"].items():
        k = int(k_str)
        counts[k] = {}
        for ctx_str, counter in table.items():
            ctx = tuple(ctx_str.split(" ")) if ctx_str else ()
            counts[k][ctx] = Counter(counter)
    totals = {
        k: {ctx: sum(counter.values()) for ctx, counter in table.items()}
        for k, table in counts.items()
    }
    return NGramModel(
        order=payload["order"],
        lambdas=list(payload["lambdas"]),
        vocab=set(payload["vocab"]),
        counts=counts,
        totals=totals,
        min_count=payload["min_count"],
        lowercase=payload["lowercase"],
    )
