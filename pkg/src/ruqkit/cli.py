"""Command-line surface.

Subcommands: train, score, ruq, plot, filter, metrics, diversity. Reports go
to stdout as JSON with a short human-readable summary on stderr; exit code 0
on success, 1 on usage errors, 2 on data errors. Everything is deterministic:
the same inputs produce byte-identical outputs, independent of --jobs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import corpus, diversity, embed_metrics, entropy_filter, ngram, overlap_metrics
from . import plotting, ruq, scorer
from .errors import DataError, UsageError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ruqkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p, jobs=False):
        p.add_argument("--lowercase", action=argparse.BooleanOptionalAction, default=True,
                       help="lowercase during tokenization (default: on)")
        if jobs:
            p.add_argument("--jobs", type=int, default=1, metavar="N",
                           help="worker threads; results never depend on this")

    p_train = sub.add_parser("train", help="train the n-gram scorer on a pairs file")
    p_train.add_argument("--pairs", required=True)
    p_train.add_argument("--order", type=int, default=3)
    p_train.add_argument("--min-count", type=int, default=1,
                         help="tokens rarer than this become <unk> (default 1: keep all)")
    p_train.add_argument("--lambda0", type=float, default=ngram.DEFAULT_LAMBDA0,
                         help="interpolation weight on the uniform floor")
    p_train.add_argument("--out", required=True, help="model file to write")
    add_common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_score = sub.add_parser("score", help="write a score file for reference/generic candidates")
    p_score.add_argument("--pairs", required=True)
    p_score.add_argument("--model", required=True)
    p_score.add_argument("--generic", action="append", default=None,
                         help="generic response text (repeatable; default: the two IDK variants)")
    p_score.add_argument("--beam", type=int, default=None,
                         help="also score the beam-decoded output with this beam width")
    p_score.add_argument("--max-len", type=int, default=20)
    p_score.add_argument("--out", required=True, help="score file to write (JSONL)")
    add_common(p_score, jobs=True)
    p_score.set_defaults(func=cmd_score)

    p_ruq = sub.add_parser("ruq", help="RUQ report: reference vs. generic preference")
    p_ruq.add_argument("--pairs")
    p_ruq.add_argument("--model")
    p_ruq.add_argument("--scores", help="external score file instead of --pairs/--model")
    p_ruq.add_argument("--generic", action="append", default=None)
    p_ruq.add_argument("--split", choices=("train", "test"), default="train")
    p_ruq.add_argument("--out", help="also write the JSON report here")
    add_common(p_ruq, jobs=True)
    p_ruq.set_defaults(func=cmd_ruq)

    p_plot = sub.add_parser("plot", help="per-position mean score series (CSV + SVG + PNG)")
    p_plot.add_argument("--pairs")
    p_plot.add_argument("--model")
    p_plot.add_argument("--scores")
    p_plot.add_argument("--generic", action="append", default=None)
    p_plot.add_argument("--beam", type=int, default=None,
                        help="include a beam-decoded series with this beam width")
    p_plot.add_argument("--max-len", type=int, default=20)
    p_plot.add_argument("--max-position", type=int, default=20)
    p_plot.add_argument("--out", required=True, help="output path prefix")
    add_common(p_plot, jobs=True)
    p_plot.set_defaults(func=cmd_plot)

    p_filter = sub.add_parser("filter", help="entropy-based corpus filtering")
    p_filter.add_argument("--pairs", required=True)
    p_filter.add_argument("--setting", choices=entropy_filter.SETTINGS, required=True)
    p_filter.add_argument("--threshold", type=float, default=1.0)
    p_filter.add_argument("--out", required=True, help="output path prefix")
    add_common(p_filter)
    p_filter.set_defaults(func=cmd_filter)

    p_metrics = sub.add_parser("metrics", help="overlap/embedding metrics against references")
    p_metrics.add_argument("--pairs", required=True,
                           help="candidate responses (response field of a pairs file)")
    p_metrics.add_argument("--multiref", required=True,
                           help="reference sets, matched to candidates by id")
    p_metrics.add_argument("--embeddings", help="word2vec-style text embeddings")
    p_metrics.add_argument("--max-n", type=int, default=4)
    p_metrics.add_argument("--out")
    add_common(p_metrics)
    p_metrics.set_defaults(func=cmd_metrics)

    p_div = sub.add_parser("diversity", help="n-gram type/token ratios of responses")
    p_div.add_argument("--pairs", required=True)
    p_div.add_argument("--max-n", type=int, default=3)
    p_div.add_argument("--out")
    add_common(p_div)
    p_div.set_defaults(func=cmd_diversity)

    return parser


def _generics(args) -> list[ruq.GenericResponse]:
    texts = args.generic if args.generic else list(ruq.DEFAULT_GENERICS)
    return [ruq.GenericResponse(text) for text in texts]


def _scorer_config() -> dict:
    return asdict(scorer.ScorerConfig())


def _load_model(path: str) -> ngram.NGramModel:
    return ngram.load_model(path)


def cmd_train(args) -> dict:
    pairs = corpus.load_pairs(args.pairs)
    lambdas = ngram.default_lambdas(args.order, args.lambda0)
    model = ngram.train(pairs, order=args.order, min_count=args.min_count,
                        lowercase=args.lowercase, lambdas=lambdas)
    ngram.save_model(model, args.out)
    print(f"trained order-{args.order} model on {len(pairs)} pairs "
          f"(vocab {len(model.vocab)}) -> {args.out}", file=sys.stderr)
    return {
        "command": "train",
        "config": {
            "order": args.order,
            "min_count": args.min_count,
            "lambdas": model.lambdas,
            "lowercase": args.lowercase,
            "scorer": _scorer_config(),
        },
        "n_pairs": len(pairs),
        "vocab_size": len(model.vocab),
        "model": args.out,
    }


def cmd_score(args) -> dict:
    pairs = corpus.load_pairs(args.pairs)
    if not pairs:
        raise DataError("pairs file is empty")
    model = _load_model(args.model)
    decode = ruq.DecodeConfig(args.beam, args.max_len) if args.beam else None
    candidates = ruq.score_corpus(model, pairs, _generics(args), decode, args.jobs)
    scorer.write_score_file(candidates, args.out)
    print(f"wrote {len(candidates)} scored candidates -> {args.out}", file=sys.stderr)
    return {
        "command": "score",
        "config": {
            "generics": [g.name for g in _generics(args)],
            "beam": args.beam,
            "max_len": args.max_len if args.beam else None,
            "lowercase": model.lowercase,
            "scorer": _scorer_config(),
        },
        "n_pairs": len(pairs),
        "n_records": len(candidates),
        "scores": args.out,
    }


def cmd_ruq(args) -> dict:
    if args.scores:
        candidates = scorer.read_score_file(args.scores)
        comparisons = ruq.comparisons_from_candidates(candidates)
        report = ruq.report_from_comparisons(comparisons, args.split)
        config = {"scores": args.scores, "split": args.split, "scorer": _scorer_config()}
    else:
        if not args.pairs or not args.model:
            raise UsageError("ruq needs either --scores or both --pairs and --model")
        pairs = corpus.load_pairs(args.pairs)
        model = _load_model(args.model)
        report = ruq.ruq_score(model, pairs, _generics(args), split=args.split,
                               jobs=args.jobs)
        config = {
            "pairs": args.pairs,
            "model": args.model,
            "split": args.split,
            "generics": [g.name for g in _generics(args)],
            "lowercase": model.lowercase,
            "lambdas": model.lambdas,
            "scorer": _scorer_config(),
        }
    for name, percent in report.ruq_percent.items():
        print(f"RUQ ({report.split}, {report.n_pairs} pairs) vs {name!r}: "
              f"{percent:.2f}%", file=sys.stderr)
    payload = {"command": "ruq", "config": config}
    payload.update(report.to_dict())
    _maybe_write_json(payload, args.out)
    return payload


def cmd_plot(args) -> dict:
    if args.scores:
        candidates = scorer.read_score_file(args.scores)
        series = ruq.series_from_candidates(candidates, args.max_position)
        config = {"scores": args.scores, "max_position": args.max_position,
                  "scorer": _scorer_config()}
    else:
        if not args.pairs or not args.model:
            raise UsageError("plot needs either --scores or both --pairs and --model")
        pairs = corpus.load_pairs(args.pairs)
        model = _load_model(args.model)
        decode = ruq.DecodeConfig(args.beam, args.max_len) if args.beam else None
        series = ruq.plot_series(model, pairs, _generics(args), decode_config=decode,
                                 max_position=args.max_position, jobs=args.jobs)
        config = {
            "pairs": args.pairs,
            "model": args.model,
            "generics": [g.name for g in _generics(args)],
            "beam": args.beam,
            "max_len": args.max_len if args.beam else None,
            "max_position": args.max_position,
            "lowercase": model.lowercase,
            "scorer": _scorer_config(),
        }
    csv_path = args.out + ".csv"
    svg_path = args.out + ".svg"
    png_path = args.out + ".png"
    plotting.emit_plot_csv(series, csv_path)
    plotting.emit_plot_svg(series, svg_path)
    plotting.render_plot_png(series, png_path)
    print(f"wrote {csv_path}, {svg_path}, {png_path}", file=sys.stderr)
    return {
        "command": "plot",
        "config": config,
        "series": [
            {"label": s.label,
             "points": [{"position": p.position, "mean_logprob": p.mean_logprob,
                         "count": p.count} for p in s.points]}
            for s in series
        ],
        "csv": csv_path,
        "svg": svg_path,
        "png": png_path,
    }


def cmd_filter(args) -> dict:
    pairs = corpus.load_pairs(args.pairs)
    if not pairs:
        raise DataError("pairs file is empty")
    kept, outcomes = entropy_filter.filter_corpus(pairs, args.setting, args.threshold)
    kept_path = args.out + ".kept.jsonl"
    outcomes_path = args.out + ".outcomes.jsonl"
    corpus.write_pairs(kept, kept_path)
    with open(outcomes_path, "w", encoding="utf-8", newline="\n") as fh:
        for outcome in outcomes:
            fh.write(json.dumps(asdict(outcome), ensure_ascii=False))
            fh.write("\n")
    print(f"kept {len(kept)}/{len(pairs)} pairs "
          f"(setting={args.setting}, threshold={args.threshold})", file=sys.stderr)
    return {
        "command": "filter",
        "config": {"setting": args.setting, "threshold": args.threshold,
                   "clustering": "identity", "entropy_log_base": 2},
        "n_pairs": len(pairs),
        "n_kept": len(kept),
        "kept": kept_path,
        "outcomes": outcomes_path,
    }


def cmd_metrics(args) -> dict:
    cands = corpus.load_pairs(args.pairs)
    items = corpus.load_multiref(args.multiref)
    if not items:
        raise DataError("multiref file is empty")
    by_id = {pair.id: pair for pair in cands}
    candidates = []
    references = []
    for item in items:
        if item.id not in by_id:
            raise DataError(f"no candidate response for item id {item.id}")
        candidates.append(corpus.tokenize(by_id[item.id].response, args.lowercase))
        references.append([corpus.tokenize(ref, args.lowercase) for ref in item.references])

    values: dict[str, float] = {}
    cb = overlap_metrics.corpus_bleu(candidates, references, args.max_n)
    am = overlap_metrics.avg_max_sentence_bleu(candidates, references, args.max_n)
    for i in range(args.max_n):
        values[f"corpus_bleu_{i + 1}"] = cb[i]
        values[f"avg_max_sentence_bleu_{i + 1}"] = am[i]
    values["rouge_l"] = _mean(
        [overlap_metrics.rouge_l(c, refs) for c, refs in zip(candidates, references)]
    )
    values["meteor_lite"] = _mean(
        [overlap_metrics.meteor_lite(c, refs) for c, refs in zip(candidates, references)]
    )

    config = {
        "max_n": args.max_n,
        "lowercase": args.lowercase,
        "rouge_beta": overlap_metrics.ROUGE_BETA,
        "meteor": {"alpha": overlap_metrics.METEOR_ALPHA,
                   "beta": overlap_metrics.METEOR_BETA,
                   "gamma": overlap_metrics.METEOR_GAMMA,
                   "stages": ["exact", "stem"]},
        "sentence_bleu_smoothing": "1/(2c) floor on zero higher-order precisions",
    }
    if args.embeddings:
        table = embed_metrics.load_embeddings(args.embeddings)
        skipped = {}
        for name, fn in (("embedding_average", embed_metrics.embedding_average),
                         ("vector_extrema", embed_metrics.vector_extrema),
                         ("greedy_matching", embed_metrics.greedy_matching)):
            per_item = [
                embed_metrics.max_over_references(fn, c, refs, table)
                for c, refs in zip(candidates, references)
            ]
            usable = [v for v in per_item if v is not None]
            skipped[name] = len(per_item) - len(usable)
            values[name] = 100.0 * _mean(usable) if usable else 0.0
        config["embeddings"] = args.embeddings
        config["embedding_dimension"] = table.dimension
        config["embedding_skipped_items"] = skipped
        config["oov_policy"] = "skip"

    report = overlap_metrics.MetricReport(values=values, config=config, n_items=len(items))
    for name, value in values.items():
        print(f"{name}: {value:.2f}", file=sys.stderr)
    payload = {"command": "metrics"}
    payload.update(report.to_dict())
    _maybe_write_json(payload, args.out)
    return payload


def cmd_diversity(args) -> dict:
    pairs = corpus.load_pairs(args.pairs)
    responses = [corpus.tokenize(p.response, args.lowercase) for p in pairs]
    values = {
        f"distinct_{n}": diversity.distinct_n(responses, n)
        for n in range(1, args.max_n + 1)
    }
    for name, value in values.items():
        print(f"{name}: {value:.2f}", file=sys.stderr)
    payload = {
        "command": "diversity",
        "config": {"max_n": args.max_n, "lowercase": args.lowercase, "pooled": True},
        "n_items": len(responses),
        "values": values,
    }
    _maybe_write_json(payload, args.out)
    return payload


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def _maybe_write_json(payload: dict, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, ensure_ascii=False)
            fh.write("\n")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        payload = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(payload, indent=2, ensure_ascii=False))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
