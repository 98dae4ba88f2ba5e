"""Scikit-learn style front door for the whole pipeline."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_dtype, check_rate
from .drums import looks_like_drum_text
from .model import ModelHyper, init_model, load_checkpoint, save_checkpoint
from .sampling import AlphaRegion, AlphaSchedule, GenerationRequest, generate
from .training import TrainConfig, evaluate, make_batches, train_model
from .vocabulary import MODES, Vocab

__all__ = ["TextLstmGenerator"]


class TextLstmGenerator(BaseEstimator):
    """Character- or word-level LSTM language model for music-as-text corpora.

    Fits a stacked-LSTM next-token model on a corpus string (chord
    progressions or drum-word tracks) and samples new sequences from it
    with a tunable diversity exponent.

    Parameters
    ----------
    mode : {"word", "char"}, default="word"
        Token granularity of the vocabulary.
    hidden_size : int, default=128
        Units per LSTM layer.
    n_layers : int, default=2
        Number of stacked LSTM layers.
    dropout : float, default=0.2
        Dropout rate applied after every LSTM layer during training.
    seq_len : int, default=64
        Tokens per truncated-backpropagation window.
    batch_size : int, default=32
        Windows per optimizer step.
    epochs : int, default=25
        Passes over the corpus.
    learning_rate, beta_1, beta_2, epsilon : float
        Adam hyperparameters.
    clip_norm : float, default=5.0
        Global gradient-norm clip; 0 disables clipping.
    precision : {"float32", "float64"}, default="float32"
        Numeric precision of the weights.
    domain : {"chord", "drum"} or None, default=None
        Corpus kind recorded in checkpoints; autodetected when None.
    random_state : int or None, default=None
        Seeds weight init, dropout, and batch noise; None draws fresh
        entropy.
    verbose : int, default=0
        Unused placeholder for ecosystem compatibility.

    Attributes
    ----------
    vocab_ : Vocab
        Token table built from the training corpus.
    model_ : LstmModel
        The trained weights.
    history_ : list of float
        Mean per-token loss (nats) after each epoch.
    """

    def __init__(
        self,
        mode: str = "word",
        hidden_size: int = 128,
        n_layers: int = 2,
        dropout: float = 0.2,
        seq_len: int = 64,
        batch_size: int = 32,
        epochs: int = 25,
        learning_rate: float = 0.001,
        beta_1: float = 0.9,
        beta_2: float = 0.999,
        epsilon: float = 1e-8,
        clip_norm: float = 5.0,
        precision: str = "float32",
        domain: str | None = None,
        random_state: int | None = None,
        verbose: int = 0,
    ):
        self.mode = mode
        self.hidden_size = hidden_size
        self.n_layers = n_layers
        self.dropout = dropout
        self.seq_len = seq_len
        self.batch_size = batch_size
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.beta_1 = beta_1
        self.beta_2 = beta_2
        self.epsilon = epsilon
        self.clip_norm = clip_norm
        self.precision = precision
        self.domain = domain
        self.random_state = random_state
        self.verbose = verbose

    def _corpus_text(self, X) -> str:
        if isinstance(X, str):
            return X
        try:
            return " ".join(X)
        except TypeError:
            raise TypeError(
                "X must be a corpus string or an iterable of strings"
            ) from None

    def _hyper(self) -> ModelHyper:
        return ModelHyper(
            hidden_size=self.hidden_size,
            n_layers=self.n_layers,
            dropout=self.dropout,
            seq_len=self.seq_len,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            beta_1=self.beta_1,
            beta_2=self.beta_2,
            epsilon=self.epsilon,
            clip_norm=self.clip_norm,
        )

    def fit(self, X, y=None):
        """Build the vocabulary and train the model on the corpus X."""
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        check_rate(self.dropout)
        check_dtype(self.precision)
        corpus = self._corpus_text(X)
        vocab = Vocab.build(corpus, self.mode)
        stream = vocab.encode(corpus)
        domain = self.domain or ("drum" if looks_like_drum_text(corpus) else "chord")
        init_seed, train_seed = np.random.SeedSequence(self.random_state).spawn(2)
        model = init_model(
            vocab,
            self._hyper(),
            precision=self.precision,
            domain=domain,
            rng=np.random.Generator(np.random.PCG64(init_seed)),
        )
        config = TrainConfig(
            seq_len=self.seq_len,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=np.random.Generator(np.random.PCG64(train_seed)),
        )
        self.history_ = train_model(model, stream, config)
        self.vocab_ = vocab
        self.model_ = model
        self.n_iter_ = self.epochs
        return self

    def sample(
        self,
        n_tokens: int,
        seed_text: str,
        default_alpha: float = 1.0,
        alpha_regions: tuple = (),
        random_state: int | None = None,
    ) -> str:
        """Generate n_tokens continuing seed_text; returns decoded text.

        alpha_regions are (start, end, alpha) triples over generated-token
        indices; everything else draws with default_alpha.
        """
        check_is_fitted(self)
        schedule = AlphaSchedule(
            default_alpha=default_alpha,
            regions=tuple(
                r if isinstance(r, AlphaRegion) else AlphaRegion(*r)
                for r in alpha_regions
            ),
        )
        request = GenerationRequest(
            seed_text=seed_text, length=n_tokens, schedule=schedule, seed=random_state
        )
        return generate(self.model_, request).text()

    def evaluate(self, X) -> float:
        """Mean per-token cross-entropy (nats) of the corpus X under the model."""
        check_is_fitted(self)
        stream = self.vocab_.encode(self._corpus_text(X))
        batches = make_batches(stream, self.seq_len, self.batch_size)
        return evaluate(self.model_, batches)

    def score(self, X, y=None) -> float:
        """Negative mean cross-entropy, so greater is better."""
        return -self.evaluate(X)

    def save(self, path: str | Path) -> None:
        check_is_fitted(self)
        save_checkpoint(self.model_, path)

    @classmethod
    def load(cls, path: str | Path) -> "TextLstmGenerator":
        """Rebuild a fitted generator from a checkpoint file."""
        model = load_checkpoint(path)
        est = cls(
            mode=model.vocab.mode,
            hidden_size=model.hyper.hidden_size,
            n_layers=model.hyper.n_layers,
            dropout=model.hyper.dropout,
            seq_len=model.hyper.seq_len,
            batch_size=model.hyper.batch_size,
            learning_rate=model.hyper.learning_rate,
            beta_1=model.hyper.beta_1,
            beta_2=model.hyper.beta_2,
            epsilon=model.hyper.epsilon,
            clip_norm=model.hyper.clip_norm,
            precision=model.precision,
            domain=model.domain,
        )
        est.vocab_ = model.vocab
        est.model_ = model
        est.history_ = []
        return est
