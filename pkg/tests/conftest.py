import random

import pytest

from ruqkit import DialogPair, tokenize, write_pairs

# Content vocabulary for synthetic fixtures.
WORDS = [
    "ash", "birch", "cedar", "dune", "ember", "fern", "grove", "harbor",
    "iris", "jade", "kelp", "lark", "maple", "nettle", "oak", "pine",
    "quartz", "reed", "sage", "thorn", "umber", "vale", "willow", "yarrow",
    "zephyr", "amber", "brook", "cliff", "dell", "elm", "flint", "glen",
    "heath", "isle", "knoll", "loch",
]

# Conversational filler mixed into the fixture so generic-response tokens are
# in-distribution (as in real dialog data); without it the IDK variants score
# at the unknown-token floor and every train/test comparison is a foregone
# conclusion.
CHATTER = [
    "you", "i", "know", "what", "to", "do", "don't", "well", "really",
    "sure", "yes", "it",
]

IDK = "I don't know."
IDK_LONG = "I don't know what to do."


def make_fixture_pairs(n=200, seed=13):
    """Synthetic dialog pairs: distinct prompts, and every response distinct
    from both IDK variants (checked on the tokenized form)."""
    banned = (tuple(tokenize(IDK, True)), tuple(tokenize(IDK_LONG, True)))
    rng = random.Random(seed)
    pool = WORDS + CHATTER
    pairs = []
    seen_prompts = set()
    for i in range(n):
        while True:
            prompt = " ".join(rng.choices(pool, k=rng.randint(3, 6)))
            if prompt not in seen_prompts:
                seen_prompts.add(prompt)
                break
        while True:
            response = " ".join(rng.choices(pool, k=rng.randint(4, 8))) + " ."
            if tuple(tokenize(response, True)) not in banned:
                break
        pairs.append(DialogPair(id=i, prompt=prompt, response=response))
    return pairs


def corrupt_with_idk(pairs, fraction=0.6):
    """Replace a deterministic `fraction` of responses with the literal IDK string."""
    cutoff = round(len(pairs) * fraction)
    out = []
    for i, pair in enumerate(pairs):
        if i < cutoff:
            out.append(DialogPair(id=pair.id, prompt=pair.prompt, response=IDK))
        else:
            out.append(pair)
    return out


@pytest.fixture(scope="session")
def fixture_pairs():
    return make_fixture_pairs()


@pytest.fixture
def pairs_file(tmp_path):
    def write(pairs, name="pairs.jsonl"):
        path = tmp_path / name
        write_pairs(pairs, path)
        return str(path)

    return write
