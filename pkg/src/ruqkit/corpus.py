"""Dialog corpora: JSONL loading, validation, and deterministic tokenization.

A corpus is either a list of (prompt, response) pairs (one JSON object per
line, ``{"id": 0, "prompt": "...", "response": "..."}``, id optional) or a
multi-reference evaluation set (``{"id": 0, "prompt": "...",
"references": ["...", ...]}``).

The tokenizer is a fixed rule set so every run is reproducible without any
external model: split on whitespace, peel leading/trailing punctuation into
single-character tokens, and split contractions at apostrophe boundaries
("don't" -> ["don", "'t"]).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError

# Token sequences are plain lists of non-empty strings. Sequences prepared
# for scoring end with END_MARKER (exactly once, last).
TokenSeq = list[str]

END_MARKER = "</s>"
SEP_MARKER = "<sep>"
UNK_MARKER = "<unk>"

# Punctuation peeled off chunk boundaries. The apostrophe is handled by the
# contraction split instead, so that tokenization is idempotent on its own
# space-joined output ("'t" must stay one token).
_PEEL_PUNCT = set(".,!?;:\"()")


@dataclass(frozen=True)
class DialogPair:
    """One training/evaluation turn: a prompt and the response it received."""

    id: int
    prompt: str
    response: str


@dataclass(frozen=True)
class MultiRefItem:
    """A prompt with one or more acceptable reference responses."""

    id: int
    prompt: str
    references: tuple[str, ...]


def tokenize(text: str, lowercase: bool) -> TokenSeq:
    """Tokenize ``text`` with the deterministic rule set (no end marker).

    Rules, applied per whitespace-separated chunk:
      1. the chunk is split before each apostrophe, so "don't" yields
         ["don", "'t"] and a trailing "dogs'" yields ["dogs", "'"];
      2. leading punctuation characters of each piece become
         single-character tokens;
      3. trailing punctuation characters likewise.
    """
    if lowercase:
        text = text.lower()
    tokens: TokenSeq = []
    for chunk in text.split():
        for piece in _split_apostrophes(chunk):
            head: list[str] = []
            while piece and piece[0] in _PEEL_PUNCT:
                head.append(piece[0])
                piece = piece[1:]
            tail: list[str] = []
            while piece and piece[-1] in _PEEL_PUNCT:
                tail.append(piece[-1])
                piece = piece[:-1]
            tokens.extend(head)
            if piece:
                tokens.append(piece)
            tokens.extend(reversed(tail))
    return tokens


def _split_apostrophes(chunk: str) -> list[str]:
    if not chunk:
        return []
    parts = []
    start = 0
    for i in range(1, len(chunk)):
        if chunk[i] == "'":
            parts.append(chunk[start:i])
            start = i
    parts.append(chunk[start:])
    return parts


def with_end_marker(tokens: TokenSeq) -> TokenSeq:
    """Return a copy of ``tokens`` terminated by the end-of-sequence marker."""
    return list(tokens) + [END_MARKER]


def validate_token_seq(tokens: TokenSeq, require_end: bool = False) -> None:
    """Check the token-sequence invariants; raise DataError on violation."""
    for tok in tokens:
        if not isinstance(tok, str) or tok == "":
            raise DataError("token sequences must contain non-empty strings")
    for i, tok in enumerate(tokens):
        if tok == END_MARKER and i != len(tokens) - 1:
            raise DataError("end marker %r may only appear last" % END_MARKER)
    if require_end and (not tokens or tokens[-1] != END_MARKER):
        raise DataError("token sequence must end with %r" % END_MARKER)


def load_pairs(path: str | Path, fmt: str = "jsonl") -> list[DialogPair]:
    """Load dialog pairs from a JSONL file, in file order.

    Ids come from the file when present, otherwise from the 0-based line
    index. Malformed lines and duplicate ids raise DataError naming the line.
    """
    if fmt != "jsonl":
        raise DataError(f"unsupported corpus format: {fmt}")
    pairs: list[DialogPair] = []
    seen_ids: set[int] = set()
    for lineno, record in _iter_jsonl(path):
        prompt = _require_text(record, "prompt", lineno)
        response = _require_text(record, "response", lineno)
        pair_id = _record_id(record, lineno, default=lineno - 1)
        if pair_id in seen_ids:
            raise DataError(f"line {lineno}: duplicate id {pair_id}")
        seen_ids.add(pair_id)
        pairs.append(DialogPair(id=pair_id, prompt=prompt, response=response))
    return pairs


def load_multiref(path: str | Path) -> list[MultiRefItem]:
    """Load a multi-reference evaluation set, in file order."""
    items: list[MultiRefItem] = []
    seen_ids: set[int] = set()
    for lineno, record in _iter_jsonl(path):
        prompt = _require_text(record, "prompt", lineno)
        refs = record.get("references")
        if not isinstance(refs, list) or not refs:
            raise DataError(f"line {lineno}: references must be a non-empty array")
        for ref in refs:
            if not isinstance(ref, str) or not ref.strip():
                raise DataError(f"line {lineno}: empty reference")
        item_id = _record_id(record, lineno, default=lineno - 1)
        if item_id in seen_ids:
            raise DataError(f"line {lineno}: duplicate id {item_id}")
        seen_ids.add(item_id)
        items.append(MultiRefItem(id=item_id, prompt=prompt, references=tuple(refs)))
    return items


def write_pairs(pairs: list[DialogPair], path: str | Path) -> None:
    """Serialize pairs to the canonical JSONL form (round-trips with load_pairs)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pair in pairs:
            fh.write(pair_to_json(pair))
            fh.write("\n")


def pair_to_json(pair: DialogPair) -> str:
    return json.dumps(
        {"id": pair.id, "prompt": pair.prompt, "response": pair.response},
        ensure_ascii=False,
    )


def _iter_jsonl(path: str | Path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                raise DataError(f"line {lineno}: blank line")
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise DataError(f"line {lineno}: record must be a JSON object")
            yield lineno, record


def _require_text(record: dict, field: str, lineno: int) -> str:
    if field not in record:
        raise DataError(f"line {lineno}: missing field {field}")
    value = record[field]
    if not isinstance(value, str):
        raise DataError(f"line {lineno}: field {field} must be a string")
    if not value.strip():
        raise DataError(f"line {lineno}: empty {field}")
    return value


def _record_id(record: dict, lineno: int, default: int) -> int:
    if "id" not in record:
        return default
    value = record["id"]
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise DataError(f"line {lineno}: id must be a non-negative integer")
    return value
