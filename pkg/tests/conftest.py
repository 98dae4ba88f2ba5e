"""Shared corpora and pre-trained session models for the test suite."""

from __future__ import annotations

import time

import numpy as np
import pytest

from textlstm.drums import encode_words
from textlstm.model import ModelHyper, init_model
from textlstm.nn import AdamState
from textlstm.training import make_batches, train_epoch
from textlstm.vocabulary import Vocab

# Ten distinct chords so the next token is a deterministic function of the
# current one: a 200-token corpus the model can memorize outright.
CHORD_CYCLE = [
    "C:maj",
    "D:min7",
    "G:7",
    "E:min",
    "A:min",
    "F:maj",
    "B:dim",
    "C:7",
    "F:9",
    "G:9",
]

# Drum component bits (kick is bit 0 / leftmost character).
KICK, SNARE, OPEN_HH, CLOSED_HH = 1 << 0, 1 << 1, 1 << 2, 1 << 3
TOM_HI, TOM_MID, TOM_LOW, CRASH, RIDE = 1 << 4, 1 << 5, 1 << 6, 1 << 7, 1 << 8

RARE_WORDS = [TOM_HI, TOM_MID, TOM_LOW, KICK | CRASH]


def make_drum_corpus(n_bars: int = 150, rare_prob: float = 0.05, seed: int = 7) -> str:
    """A rock groove where tom/crash words appear with probability rare_prob."""
    rng = np.random.default_rng(seed)
    base = []
    for slot in range(16):
        word = CLOSED_HH if slot % 2 == 0 else 0
        if slot in (0, 8):
            word |= KICK
        if slot in (4, 12):
            word |= SNARE
        base.append(word)
    bars = []
    for _ in range(n_bars):
        bar = [
            int(rng.choice(RARE_WORDS)) if rng.random() < rare_prob else base[slot]
            for slot in range(16)
        ]
        bars.append(bar)
    return encode_words(bars)


def tom_crash_fraction(tokens: list[str]) -> float:
    """Share of word tokens with any tom or crash bit set."""
    words = [t for t in tokens if len(t) == 9 and set(t) <= {"0", "1"}]
    if not words:
        return 0.0
    hits = sum(1 for w in words if "1" in w[4:8])
    return hits / len(words)


@pytest.fixture(scope="session")
def cyclic_chord_corpus() -> str:
    return " ".join(CHORD_CYCLE * 20)


@pytest.fixture(scope="session")
def drum_corpus() -> str:
    return make_drum_corpus()


def train_until(corpus: str, *, hidden: int, seq_len: int, batch_size: int,
                max_epochs: int, target_loss: float = 0.0, seed: int = 0,
                mode: str = "word", dropout: float = 0.2):
    """Train a fresh model, stopping early once target_loss is reached."""
    vocab = Vocab.build(corpus, mode)
    stream = vocab.encode(corpus)
    hyper = ModelHyper(
        hidden_size=hidden, dropout=dropout, seq_len=seq_len, batch_size=batch_size
    )
    model = init_model(vocab, hyper, rng=seed)
    batches = make_batches(stream, seq_len, batch_size)
    adam = AdamState.for_params(model.param_arrays())
    rng = np.random.Generator(np.random.PCG64(seed + 1))
    history = []
    start = time.perf_counter()
    for _ in range(max_epochs):
        history.append(train_epoch(model, batches, adam, rng))
        if history[-1] < target_loss:
            break
    return {
        "model": model,
        "history": history,
        "seconds": time.perf_counter() - start,
    }


@pytest.fixture(scope="session")
def memorized_chord(cyclic_chord_corpus):
    """The scaled-down memorization run: loss < 0.1 within 500 epochs."""
    return train_until(
        cyclic_chord_corpus,
        hidden=32,
        seq_len=25,
        batch_size=2,
        max_epochs=500,
        target_loss=0.1,
    )


@pytest.fixture(scope="session")
def fill_drum_model(drum_corpus):
    """A drum model trained enough that rare-word odds respond to alpha."""
    return train_until(
        drum_corpus, hidden=32, seq_len=34, batch_size=16, max_epochs=30
    )["model"]


@pytest.fixture(scope="session")
def quick_chord_model(cyclic_chord_corpus):
    return train_until(
        cyclic_chord_corpus, hidden=16, seq_len=16, batch_size=8, max_epochs=3
    )["model"]


@pytest.fixture(scope="session")
def quick_drum_model():
    corpus = make_drum_corpus(n_bars=40)
    model = train_until(
        corpus, hidden=16, seq_len=17, batch_size=8, max_epochs=2
    )["model"]
    model.domain = "drum"
    return model
