import json

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers, processors
from transformers import PreTrainedTokenizerFast, T5Config, T5ForConditionalGeneration

# word inventory for the offline test checkpoint: ordinary dialog words plus
# what the two IDK variants tokenize to
VOCAB_WORDS = [
    "hello", "world", "how", "are", "you", "today", "the", "cat", "sat",
    "down", "on", "a", "mat", "fine", "thanks", "where", "is", "my", "book",
    "it", "rained", "all", "day", "i", "don't", "know", "what", "to", "do",
    ".", "!", "?",
]


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    """A tiny randomly initialized seq2seq checkpoint on disk, loadable through
    the same AutoTokenizer/AutoModelForSeq2SeqLM path as any public model."""
    path = tmp_path_factory.mktemp("tiny-seq2seq")
    vocab = {"<pad>": 0, "</s>": 1, "<unk>": 2}
    for word in VOCAB_WORDS:
        vocab[word] = len(vocab)

    tokenizer = Tokenizer(models.WordLevel(vocab, unk_token="<unk>"))
    tokenizer.pre_tokenizer = pre_tokenizers.WhitespaceSplit()
    tokenizer.post_processor = processors.TemplateProcessing(
        single="$A </s>", special_tokens=[("</s>", 1)]
    )
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        eos_token="</s>",
        pad_token="<pad>",
        unk_token="<unk>",
    )
    fast.save_pretrained(path)

    torch.manual_seed(1234)
    config = T5Config(
        vocab_size=len(vocab),
        d_model=32,
        d_ff=64,
        d_kv=8,
        num_layers=2,
        num_heads=2,
        decoder_start_token_id=0,
        pad_token_id=0,
        eos_token_id=1,
    )
    T5ForConditionalGeneration(config).save_pretrained(path)
    return str(path)


TEN_PAIRS = [
    ("hello how are you", "fine thanks ."),
    ("where is my book", "on the mat ."),
    ("how was the day", "it rained all day ."),
    ("what did the cat do", "the cat sat down ."),
    ("are you there", "hello world !"),
    ("do you know the cat", "i know the cat ."),
    ("what is on the mat", "my book is on the mat ."),
    ("how are you today", "fine ."),
    ("where did it rain", "all day ."),
    ("what do you do", "you know what i do ."),
]


@pytest.fixture(scope="session")
def corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "pairs.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for i, (prompt, response) in enumerate(TEN_PAIRS):
            fh.write(json.dumps({"id": i, "prompt": prompt, "response": response}))
            fh.write("\n")
    return str(path)
