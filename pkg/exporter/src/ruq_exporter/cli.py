"""CLI: score a pairs corpus with a seq2seq checkpoint and write the
JSONL score file (flags mirror the consumer's naming)."""

from __future__ import annotations

import argparse
import json
import sys

from .export import ExportError, export_scores, load_pairs, load_seq2seq

DEFAULT_GENERICS = ["I don't know.", "I don't know what to do."]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ruq-export", description=__doc__)
    parser.add_argument("--pairs", required=True, help="pairs corpus (JSONL)")
    parser.add_argument("--model", required=True,
                        help="seq2seq checkpoint identifier or local path")
    parser.add_argument("--generic", action="append", default=None,
                        help="generic response text (repeatable; default: the two IDK variants)")
    parser.add_argument("--beam", type=int, default=None,
                        help="also score the model's beam-search output")
    parser.add_argument("--max-len", type=int, default=32)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--out", required=True, help="score file to write (JSONL)")
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        pairs = load_pairs(args.pairs)
        tokenizer, model = load_seq2seq(args.model, device=args.device)
        generics = args.generic if args.generic else DEFAULT_GENERICS
        n_records = export_scores(
            pairs, model, tokenizer, generics, args.out,
            beam=args.beam, max_len=args.max_len,
        )
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {n_records} records -> {args.out}", file=sys.stderr)
    print(json.dumps({
        "command": "export",
        "config": {
            "model": args.model,
            "generics": generics,
            "beam": args.beam,
            "max_len": args.max_len if args.beam else None,
            "log_base": "e",
            "include_end_marker": True,
        },
        "n_pairs": len(pairs),
        "n_records": n_records,
        "scores": args.out,
    }, indent=2, ensure_ascii=False))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
