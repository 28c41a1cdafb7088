"""Score-file exporter: run a seq2seq model over a dialog corpus and write
token-level log-probabilities for the reference and generic responses, in
the exact JSONL format the ruqkit `--scores` path ingests."""

from .export import ExportError, export_scores, forced_logprobs, load_seq2seq

__version__ = "0.1.0"
