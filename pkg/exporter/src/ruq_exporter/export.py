"""Forced-decoding log-probability extraction for seq2seq models.

For every (prompt, response) pair the exporter emits one record per
candidate: the reference response, each generic response, and optionally the
model's own beam-search output. Tokens are the model tokenizer's tokens (the
consumer never re-tokenizes them); log-probabilities are natural-log and
include the end-of-sequence token.
"""

from __future__ import annotations

import json
import logging
import statistics
from dataclasses import dataclass

import torch

log = logging.getLogger(__name__)


class ExportError(ValueError):
    """Invalid corpus or model input."""


@dataclass(frozen=True)
class Pair:
    id: int
    prompt: str
    response: str


def load_pairs(path: str) -> list[Pair]:
    """Read the pairs JSONL format ({"id": 0, "prompt": ..., "response": ...})."""
    pairs = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                raise ExportError(f"line {lineno}: blank line")
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ExportError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            for field in ("prompt", "response"):
                if field not in record:
                    raise ExportError(f"line {lineno}: missing field {field}")
            pair_id = record.get("id", lineno - 1)
            if pair_id in seen:
                raise ExportError(f"line {lineno}: duplicate id {pair_id}")
            seen.add(pair_id)
            pairs.append(Pair(pair_id, record["prompt"], record["response"]))
    return pairs


def load_seq2seq(model_id: str, device: str = "cpu"):
    """Load tokenizer and model from a checkpoint identifier or local path."""
    from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(model_id)
    model = AutoModelForSeq2SeqLM.from_pretrained(model_id)
    model.to(device)
    model.eval()
    return tokenizer, model


@torch.no_grad()
def forced_logprobs(model, tokenizer, prompt: str, target_ids: torch.Tensor):
    """Per-token conditional log-probabilities of ``target_ids`` given the
    prompt (forced decoding). Returns (tokens, logprobs) or None when the
    target is empty."""
    if target_ids.numel() == 0:
        return None
    device = next(model.parameters()).device
    encoded = tokenizer(prompt, return_tensors="pt").to(device)
    labels = target_ids.unsqueeze(0).to(device)
    outputs = model(
        input_ids=encoded.input_ids,
        attention_mask=encoded.attention_mask,
        labels=labels,
    )
    logprobs = torch.log_softmax(outputs.logits[0].float(), dim=-1)
    picked = logprobs[torch.arange(labels.shape[1]), labels[0]]
    tokens = tokenizer.convert_ids_to_tokens(labels[0].tolist())
    # exactly-0 probabilities cannot appear after log_softmax; the min() only
    # guards float round-off producing a tiny positive value
    return tokens, [min(lp, 0.0) for lp in picked.tolist()]


def _encode_target(tokenizer, text: str) -> torch.Tensor:
    return tokenizer(text, return_tensors="pt").input_ids[0]


@torch.no_grad()
def _decode_ids(model, tokenizer, prompt: str, beam: int, max_len: int) -> torch.Tensor:
    device = next(model.parameters()).device
    encoded = tokenizer(prompt, return_tensors="pt").to(device)
    sequences = model.generate(
        input_ids=encoded.input_ids,
        attention_mask=encoded.attention_mask,
        num_beams=beam,
        max_new_tokens=max_len,
        do_sample=False,
    )
    ids = sequences[0, 1:].cpu()  # drop the decoder start token
    eos = tokenizer.eos_token_id
    if eos is not None and (ids.numel() == 0 or int(ids[-1]) != eos):
        # length-capped hypothesis: terminate it so the end token is scored
        ids = torch.cat([ids, torch.tensor([eos])])
    return ids


def export_scores(
    pairs: list[Pair],
    model,
    tokenizer,
    generics: list[str],
    out_path: str,
    beam: int | None = None,
    max_len: int = 32,
) -> int:
    """Write one score record per (pair, candidate) to ``out_path`` (JSONL),
    in pair order. Returns the number of records written."""
    if not pairs:
        raise ExportError("no pairs to score")
    n_records = 0
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for pair in pairs:
            candidates = [("reference", _encode_target(tokenizer, pair.response))]
            for generic in generics:
                candidates.append(
                    (f"generic:{generic}", _encode_target(tokenizer, generic))
                )
            if beam is not None:
                candidates.append(
                    ("decoded", _decode_ids(model, tokenizer, pair.prompt, beam, max_len))
                )
            for label, target_ids in candidates:
                scored = forced_logprobs(model, tokenizer, pair.prompt, target_ids)
                if scored is None:
                    log.warning(
                        "pair %d: tokenizer produced an empty sequence for %s; skipped",
                        pair.id,
                        label,
                    )
                    continue
                tokens, logprobs = scored
                record = {
                    "pair_id": pair.id,
                    "label": label,
                    "tokens": tokens,
                    "logprobs": logprobs,
                    "normalized_score": float(statistics.mean(logprobs)),
                }
                fh.write(json.dumps(record, ensure_ascii=False))
                fh.write("\n")
                n_records += 1
    return n_records
