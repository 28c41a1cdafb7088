import math
import random

import pytest

from ruqkit import (
    DataError,
    avg_max_sentence_bleu,
    corpus_bleu,
    meteor_lite,
    rouge_l,
    sentence_bleu,
)

from conftest import WORDS
from oracles import naive_corpus_bleu, naive_rouge_l


def random_corpus(rng, n_items, vocab_size=6, max_len=8, max_refs=3):
    vocab = WORDS[:vocab_size]
    candidates = [
        [rng.choice(vocab) for _ in range(rng.randint(1, max_len))] for _ in range(n_items)
    ]
    references = [
        [[rng.choice(vocab) for _ in range(rng.randint(1, max_len))]
         for _ in range(rng.randint(1, max_refs))]
        for _ in range(n_items)
    ]
    return candidates, references


class TestSentenceBleu:
    def test_identity_is_hundred(self):
        sent = ["the", "cat", "sat", "down", "."]
        assert sentence_bleu(sent, [sent]) == [100.0] * 4

    def test_half_unigram_precision(self):
        values = sentence_bleu(["the", "cat"], [["the", "dog"]])
        assert values[0] == pytest.approx(50.0, abs=1e-12)
        # bigram precision smoothed to 1/(2*2)
        assert values[1] == pytest.approx(100.0 * math.sqrt(0.5 * 0.25), abs=1e-9)

    def test_brevity_penalty(self):
        values = sentence_bleu(["the"], [["the", "x"]])
        assert values[0] == pytest.approx(100.0 * math.exp(1.0 - 2.0), abs=1e-9)

    def test_empty_candidate_gives_zeros(self):
        assert sentence_bleu([], [["a"]]) == [0.0] * 4

    def test_disjoint_gives_zeros(self):
        assert sentence_bleu(["a", "b"], [["c", "d"]]) == [0.0] * 4

    def test_closest_ref_length_tie_prefers_shorter(self):
        # candidate length 3; refs of lengths 2 and 4 tie; shorter (2) wins -> BP = 1
        values = sentence_bleu(["a", "b", "c"], [["a", "b"], ["a", "b", "c", "d"]])
        assert values[0] == pytest.approx(100.0, abs=1e-9)


class TestCorpusBleu:
    def test_identity_is_hundred(self):
        cands = [["a", "b"], ["c", "d", "e"]]
        refs = [[["a", "b"]], [["c", "d", "e"]]]
        assert corpus_bleu(cands, refs) == [100.0] * 4

    def test_pooled_counts_by_hand(self):
        cands = [["the", "cat"], ["the"]]
        refs = [[["the", "dog"]], [["the", "x"]]]
        values = corpus_bleu(cands, refs)
        # pooled: correct1 = 2, total1 = 3, c = 3, r = 4
        expected = 100.0 * (2.0 / 3.0) * math.exp(1.0 - 4.0 / 3.0)
        assert values[0] == pytest.approx(expected, abs=1e-9)
        # no bigram matches anywhere: corpus precision 0, no smoothing
        assert values[1] == 0.0

    def test_disjoint_corpus_is_zero(self):
        assert corpus_bleu([["a"]], [[["b"]]]) == [0.0] * 4

    def test_length_mismatch_rejected(self):
        with pytest.raises(DataError):
            corpus_bleu([["a"]], [])

    def test_matches_brute_force_oracle(self):
        rng = random.Random(404)
        for _ in range(20):
            cands, refs = random_corpus(rng, rng.randint(1, 8))
            mine = corpus_bleu(cands, refs)
            naive = naive_corpus_bleu(cands, refs)
            for a, b in zip(mine, naive):
                assert a == pytest.approx(b, abs=1e-9)

    def test_order_invariance(self):
        rng = random.Random(7)
        cands, refs = random_corpus(rng, 6)
        paired = list(zip(cands, refs))
        rng.shuffle(paired)
        shuffled_c, shuffled_r = [list(x) for x in zip(*paired)]
        assert corpus_bleu(cands, refs) == pytest.approx(
            corpus_bleu(shuffled_c, shuffled_r), abs=1e-12
        )


class TestAvgMaxSentenceBleu:
    def test_single_reference_equals_mean_sentence_bleu(self):
        rng = random.Random(11)
        cands, refs = random_corpus(rng, 5, max_refs=1)
        avg = avg_max_sentence_bleu(cands, refs)
        per_item = [sentence_bleu(c, r) for c, r in zip(cands, refs)]
        for k in range(4):
            mean_k = sum(values[k] for values in per_item) / len(per_item)
            assert avg[k] == pytest.approx(mean_k, abs=1e-12)

    def test_max_picks_identity(self):
        cand = ["b", "c"]
        refs = [[["x", "y"], ["b", "c"], ["z"]]]
        assert avg_max_sentence_bleu([cand], refs) == [100.0] * 4

    def test_extra_reference_never_decreases(self):
        rng = random.Random(13)
        for _ in range(20):
            cands, refs = random_corpus(rng, 4)
            base = avg_max_sentence_bleu(cands, refs)
            extended = [r + [[rng.choice(WORDS[:6])]] for r in refs]
            bigger = avg_max_sentence_bleu(cands, extended)
            for k in range(4):
                assert bigger[k] >= base[k] - 1e-12


class TestRougeL:
    def test_identity_is_hundred(self):
        sent = ["a", "b", "c"]
        assert rouge_l(sent, [sent]) == 100.0

    def test_derived_formula(self):
        # LCS = 3, P = 3/4, R = 1
        p, r, b2 = 0.75, 1.0, 1.2**2
        expected = 100.0 * (1 + b2) * p * r / (r + b2 * p)
        assert rouge_l(["a", "b", "c", "d"], [["a", "c", "d"]]) == pytest.approx(
            expected, abs=1e-12
        )

    def test_disjoint_is_zero(self):
        assert rouge_l(["a", "b"], [["c", "d"]]) == 0.0

    def test_multi_reference_max(self):
        cand = ["a", "b", "c"]
        assert rouge_l(cand, [["z"], ["a", "b", "c"]]) == 100.0

    def test_matches_brute_force_oracle(self):
        rng = random.Random(505)
        for _ in range(30):
            cands, refs = random_corpus(rng, 1)
            assert rouge_l(cands[0], refs[0]) == pytest.approx(
                naive_rouge_l(cands[0], refs[0]), abs=1e-9
            )


class TestMeteorLite:
    def test_identity_penalty(self):
        sent = ["the", "cat", "sat", "down"]
        expected = 100.0 * (1.0 - 0.5 * (1.0 / 4.0) ** 3)
        assert meteor_lite(sent, [sent]) == pytest.approx(expected, abs=1e-12)
        assert meteor_lite(sent, [sent]) == 99.21875

    def test_disjoint_is_zero(self):
        assert meteor_lite(["a", "b"], [["c", "d"]]) == 0.0

    def test_stem_match(self):
        # single match found via stemming; one chunk; P = R = 1
        assert meteor_lite(["cats"], [["cat"]]) == pytest.approx(50.0, abs=1e-12)

    def test_fragmented_alignment_pays_penalty(self):
        # all three unigrams match but in 3 chunks: penalty = 0.5 * (3/3)^3
        assert meteor_lite(["the", "cat", "sat"], [["the", "sat", "cat"]]) == pytest.approx(
            50.0, abs=1e-12
        )

    def test_multi_reference_max(self):
        cand = ["w", "x", "y", "z"]
        assert meteor_lite(cand, [["nothing"], cand]) == 99.21875

    def test_precision_recall_weighting(self):
        # 1 match, candidate length 1, reference length 2:
        # P = 1, R = 0.5, F = (1*0.5)/(0.9*1 + 0.1*0.5)
        expected = 100.0 * (0.5 / 0.95) * (1.0 - 0.5)
        assert meteor_lite(["cat"], [["cat", "nap"]]) == pytest.approx(expected, abs=1e-12)
