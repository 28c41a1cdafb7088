"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line (run with `pytest -s tests/test_acceptance.py` to see them).
"""

import json
import math
import random
import time
from contextlib import contextmanager

import pytest

from ruqkit import (
    GenericResponse,
    UniformScorer,
    corpus_bleu,
    filter_corpus,
    plot_series,
    rouge_l,
    ruq_score,
    train,
    write_pairs,
)
from ruqkit.cli import run
from ruqkit.plotting import parse_plot_csv

from conftest import IDK, IDK_LONG, corrupt_with_idk, make_fixture_pairs
from oracles import naive_corpus_bleu, naive_rouge_l
from test_overlap_metrics import random_corpus
from test_ruq import ShiftedScorer, idk_generics


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def test_memorization_ruq(fixture_pairs):
    with criterion("memorization RUQ: order-3 scorer on 200 fixture pairs, RUQ-train >= 95%"):
        start = time.perf_counter()
        model = train(fixture_pairs, order=3, min_count=1)
        report = ruq_score(model, fixture_pairs, idk_generics(), split="train")
        elapsed = time.perf_counter() - start
        assert report.n_pairs == 200
        assert report.ruq_percent[IDK] >= 95.0, report.ruq_percent
        assert report.ruq_percent[IDK_LONG] >= 95.0, report.ruq_percent
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_degenerate_preference_ruq(fixture_pairs):
    with criterion("degenerate-preference RUQ: 60% IDK references, RUQ-train <= 45%"):
        start = time.perf_counter()
        corrupted = corrupt_with_idk(fixture_pairs, fraction=0.6)
        model = train(corrupted, order=3, min_count=1)
        report = ruq_score(model, corrupted, [GenericResponse(IDK)], split="train")
        elapsed = time.perf_counter() - start
        assert report.ruq_percent[IDK] <= 45.0, report.ruq_percent
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_train_test_gap(fixture_pairs):
    with criterion("train/test gap: RUQ-test <= RUQ-train on a held-out split"):
        train_split = fixture_pairs[:160]
        test_split = fixture_pairs[160:]
        model = train(train_split, order=3, min_count=1)
        on_train = ruq_score(model, train_split, idk_generics(), split="train")
        on_test = ruq_score(model, test_split, idk_generics(), split="test")
        for name in (IDK, IDK_LONG):
            assert on_test.ruq_percent[name] <= on_train.ruq_percent[name], (
                name, on_test.ruq_percent, on_train.ruq_percent,
            )


def test_entropy_filter_oracle():
    with criterion("entropy filter: threshold 1.0 drops exactly the 4-target source"):
        from test_entropy_filter import entropy_oracle_corpus

        pairs = entropy_oracle_corpus()
        kept_source, outcomes = filter_corpus(pairs, "source", 1.0)
        assert [o.pair_id for o in outcomes if not o.kept] == [0, 1, 2, 3]
        assert len(kept_source) == len(pairs) - 4

        kept_target, _ = filter_corpus(pairs, "target", 1.0)
        assert kept_target == pairs

        kept_both, _ = filter_corpus(pairs, "both", 1.0)
        assert {p.id for p in kept_both} == (
            {p.id for p in kept_source} & {p.id for p in kept_target}
        )


def test_bleu_rouge_oracle():
    with criterion("BLEU/ROUGE match brute-force recomputation on 50 random corpora (1e-9)"):
        rng = random.Random(8191)
        for _ in range(50):
            cands, refs = random_corpus(rng, rng.randint(1, 8))
            mine = corpus_bleu(cands, refs)
            naive = naive_corpus_bleu(cands, refs)
            for a, b in zip(mine, naive):
                assert a == pytest.approx(b, abs=1e-9)
            for cand, ref_set in zip(cands, refs):
                assert rouge_l(cand, ref_set) == pytest.approx(
                    naive_rouge_l(cand, ref_set), abs=1e-9
                )
        # sentence identity is exactly 100
        sent = ["the", "old", "harbor", "wall", "."]
        assert corpus_bleu([sent], [[sent]]) == [100.0, 100.0, 100.0, 100.0]
        assert rouge_l(sent, [sent]) == 100.0


def test_scorer_contract_normalization(fixture_pairs):
    with criterion("scorer contract: sum(exp(logprob)) = 1 +/- 1e-9 over 1000 random contexts"):
        model = train(fixture_pairs, order=3, min_count=1)
        rng = random.Random(2718)
        tokens = sorted(model.vocab) + ["oov-a", "oov-b", "oov-c"]
        for _ in range(1000):
            context = rng.choices(tokens, k=rng.randint(0, 8))
            total = math.fsum(math.exp(lp) for _, lp in model.next_logprobs(context))
            assert abs(total - 1.0) <= 1e-9, (context, total)


def test_scorer_contract_uniform_ruq(fixture_pairs):
    with criterion("scorer contract: uniform scorer gives RUQ = 0%"):
        scorer = UniformScorer(vocab_size=37)
        report = ruq_score(scorer, fixture_pairs, idk_generics())
        assert report.ruq_percent[IDK] == 0.0
        assert report.ruq_percent[IDK_LONG] == 0.0


def test_scorer_contract_shift_invariance(fixture_pairs):
    with criterion("scorer contract: constant shift leaves every preferred flag unchanged"):
        pairs = fixture_pairs[:60]
        model = train(pairs, order=3, min_count=1)
        base = ruq_score(model, pairs, idk_generics())
        shifted = ruq_score(ShiftedScorer(model, -1.25), pairs, idk_generics())
        for a, b in zip(base.comparisons, shifted.comparisons):
            assert a.reference_preferred == b.reference_preferred
        assert base.ruq_percent == shifted.ruq_percent


def test_scorer_contract_jobs_independence(fixture_pairs, tmp_path, capsys):
    with criterion("scorer contract: corpus-level outputs independent of --jobs"):
        pairs_path = tmp_path / "pairs.jsonl"
        write_pairs(fixture_pairs[:80], pairs_path)
        model_path = tmp_path / "model.json"
        assert run(["train", "--pairs", str(pairs_path), "--out", str(model_path)]) == 0
        capsys.readouterr()

        outputs = []
        for jobs in ("1", "3"):
            assert run(["ruq", "--pairs", str(pairs_path), "--model", str(model_path),
                        "--jobs", jobs]) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]

        plots = []
        for jobs in ("1", "3"):
            prefix = str(tmp_path / f"plot-jobs{jobs}")
            assert run(["plot", "--pairs", str(pairs_path), "--model", str(model_path),
                        "--jobs", jobs, "--out", prefix]) == 0
            capsys.readouterr()
            plots.append((tmp_path / f"plot-jobs{jobs}.csv").read_bytes())
        assert plots[0] == plots[1]


def test_plot_pipeline(fixture_pairs, tmp_path, capsys):
    with criterion("plot pipeline: byte-identical CSV/SVG across runs; CSV parses back"):
        pairs_path = tmp_path / "pairs.jsonl"
        write_pairs(fixture_pairs, pairs_path)
        model_path = tmp_path / "model.json"
        assert run(["train", "--pairs", str(pairs_path), "--out", str(model_path)]) == 0

        for prefix in ("first", "second"):
            code = run(["plot", "--pairs", str(pairs_path), "--model", str(model_path),
                        "--max-position", "12", "--out", str(tmp_path / prefix)])
            assert code == 0
        capsys.readouterr()
        for suffix in (".csv", ".svg"):
            first = (tmp_path / ("first" + suffix)).read_bytes()
            second = (tmp_path / ("second" + suffix)).read_bytes()
            assert first == second, suffix

        model = train(fixture_pairs, order=3, min_count=1)
        in_memory = plot_series(model, fixture_pairs, idk_generics(), max_position=12)
        parsed = {s.label: s.points for s in parse_plot_csv(tmp_path / "first.csv")}
        assert set(parsed) == {s.label for s in in_memory}
        for series in in_memory:
            got = parsed[series.label]
            assert [(p.position, p.count) for p in got] == [
                (p.position, p.count) for p in series.points
            ]
            for mine, theirs in zip(series.points, got):
                assert theirs.mean_logprob == float(f"{mine.mean_logprob:.6f}")
