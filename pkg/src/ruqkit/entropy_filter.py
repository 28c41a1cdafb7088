"""Entropy-based corpus filtering.

One-to-many sources and many-to-one targets are what make models gravitate
toward generic responses, so pairs whose source (or target) utterance has a
high-entropy partner distribution are dropped. Utterances are clustered by
exact string identity on their tokenized, lowercased form; entropy is the
Shannon entropy (base 2) of the empirical partner distribution, so a
threshold of 1.0 means "more spread than two equiprobable partners".
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .corpus import DialogPair, tokenize
from .errors import DataError

AS_SOURCE = "as_source"
AS_TARGET = "as_target"
SETTINGS = ("source", "target", "both")


@dataclass(frozen=True)
class UtteranceEntropy:
    utterance: str  # identity-cluster key (tokenized, lowercased)
    role: str  # as_source | as_target
    entropy_bits: float
    support: int  # number of pairs the utterance appears in


@dataclass(frozen=True)
class FilterOutcome:
    pair_id: int
    kept: bool
    source_entropy_bits: float
    target_entropy_bits: float
    setting: str
    threshold: float


def cluster_key(text: str) -> str:
    """IDENTITY clustering key: exact match on the tokenized, lowercased text."""
    return " ".join(tokenize(text, lowercase=True))


def utterance_entropy(pairs: list[DialogPair], role: str) -> dict[str, UtteranceEntropy]:
    """Entropy of each utterance's empirical partner distribution.

    role=as_source: for each distinct source s, entropy of p(target | s) over
    its paired targets (multiplicity counted). role=as_target: symmetric.
    """
    if not pairs:
        raise DataError("cannot compute entropies on an empty corpus")
    if role not in (AS_SOURCE, AS_TARGET):
        raise DataError(f"unknown role: {role}")

    partners: dict[str, Counter] = {}
    for pair in pairs:
        src = cluster_key(pair.prompt)
        tgt = cluster_key(pair.response)
        key, partner = (src, tgt) if role == AS_SOURCE else (tgt, src)
        if key not in partners:
            partners[key] = Counter()
        partners[key][partner] += 1

    out = {}
    for key, counter in partners.items():
        total = sum(counter.values())
        entropy = -sum(
            (n / total) * math.log2(n / total) for n in counter.values()
        )
        out[key] = UtteranceEntropy(
            utterance=key, role=role, entropy_bits=max(entropy, 0.0), support=total
        )
    return out


def filter_corpus(
    pairs: list[DialogPair], setting: str, threshold: float
) -> tuple[list[DialogPair], list[FilterOutcome]]:
    """Drop pairs whose entropy strictly exceeds ``threshold``.

    setting=source tests the pair's source-side entropy, setting=target the
    target side, setting=both drops the union. Kept pairs stay in order.
    """
    if setting not in SETTINGS:
        raise DataError(f"unknown filter setting: {setting}")
    if threshold < 0:
        raise DataError("threshold must be >= 0")

    source_entropy = utterance_entropy(pairs, AS_SOURCE)
    target_entropy = utterance_entropy(pairs, AS_TARGET)

    kept: list[DialogPair] = []
    outcomes: list[FilterOutcome] = []
    for pair in pairs:
        src_bits = source_entropy[cluster_key(pair.prompt)].entropy_bits
        tgt_bits = target_entropy[cluster_key(pair.response)].entropy_bits
        drop_source = src_bits > threshold
        drop_target = tgt_bits > threshold
        if setting == "source":
            keep = not drop_source
        elif setting == "target":
            keep = not drop_target
        else:
            keep = not (drop_source or drop_target)
        if keep:
            kept.append(pair)
        outcomes.append(
            FilterOutcome(
                pair_id=pair.id,
                kept=keep,
                source_entropy_bits=src_bits,
                target_entropy_bits=tgt_bits,
                setting=setting,
                threshold=threshold,
            )
        )
    return kept, outcomes
