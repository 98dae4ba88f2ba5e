"""Truncated-BPTT training over a token stream.

The stream is cut into non-overlapping next-token windows, windows are
grouped into batches, and every window starts from a zero state.  One Adam
step is taken per batch; gradients are clipped by global norm first.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import check_rng
from . import nn
from .model import LstmModel, save_checkpoint
from .nn import AdamState
from .vocabulary import TokenStream

__all__ = [
    "TrainingDiverged",
    "TrainConfig",
    "Batch",
    "make_batches",
    "train_epoch",
    "evaluate",
    "train_model",
]

logger = logging.getLogger(__name__)

Batch = tuple[np.ndarray, np.ndarray]  # inputs (B, T), targets (B, T)


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class TrainConfig:
    seq_len: int = 64
    batch_size: int = 32
    epochs: int = 25
    seed: int | np.random.Generator | None = 0
    checkpoint_interval: int = 0
    checkpoint_path: str | Path | None = None

    def __post_init__(self) -> None:
        if self.seq_len < 2:
            raise ValueError(f"seq_len must be >= 2, got {self.seq_len}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")


def make_batches(
    stream: TokenStream | np.ndarray, seq_len: int, batch_size: int
) -> list[Batch]:
    """Non-overlapping (input, next-token target) windows grouped in batches.

    The trailing partial window is dropped; a final short batch is kept.
    """
    indices = stream.indices if isinstance(stream, TokenStream) else np.asarray(stream)
    n = len(indices)
    if n < seq_len + 1:
        raise ValueError(
            f"stream of {n} tokens is too short for seq_len {seq_len} "
            f"(needs at least seq_len + 1)"
        )
    n_windows = (n - 1) // seq_len
    inputs = np.stack(
        [indices[w * seq_len : w * seq_len + seq_len] for w in range(n_windows)]
    )
    targets = np.stack(
        [indices[w * seq_len + 1 : w * seq_len + seq_len + 1] for w in range(n_windows)]
    )
    return [
        (inputs[b : b + batch_size], targets[b : b + batch_size])
        for b in range(0, n_windows, batch_size)
    ]


def _clip_global_norm(grads: list[np.ndarray], clip_norm: float) -> None:
    if clip_norm <= 0:
        return
    total = math.sqrt(sum(float(np.sum(g.astype(np.float64) ** 2)) for g in grads))
    if total > clip_norm:
        scale = clip_norm / total
        for g in grads:
            g *= scale


def train_epoch(
    model: LstmModel,
    batches: list[Batch],
    adam_state: AdamState,
    rng: int | np.random.Generator | None = None,
) -> float:
    """One pass over the batches; returns the mean per-token loss in nats.

    The model is updated in place, one Adam step per batch.  A non-finite
    loss aborts immediately rather than poisoning the weights.
    """
    rng = check_rng(rng)
    hyper = model.hyper
    dtype = model.dtype
    total_loss = 0.0
    total_tokens = 0
    for inputs, targets in batches:
        x_seq = nn.one_hot(inputs.T, model.vocab_size, dtype=dtype)  # (T, B, V)
        t_seq = targets.T
        masks = None
        if hyper.dropout > 0:
            masks = [
                nn.dropout_mask(x_seq.shape[:2] + (layer.hidden_size,), hyper.dropout, rng, dtype)
                for layer in model.layers
            ]
        loss, caches = nn.sequence_loss(model.layers, model.output, x_seq, t_seq, masks)
        if not math.isfinite(loss):
            raise TrainingDiverged(f"non-finite loss {loss!r}; training diverged")
        grads = nn.sequence_backward(model.layers, model.output, caches, t_seq, masks)
        _clip_global_norm(grads, hyper.clip_norm)
        nn.adam_step(model.param_arrays(), grads, adam_state, hyper.adam())
        total_loss += loss
        total_tokens += inputs.size
    return total_loss / total_tokens


def evaluate(model: LstmModel, batches: list[Batch]) -> float:
    """Mean per-token cross-entropy with dropout off and no updates."""
    total_loss = 0.0
    total_tokens = 0
    for inputs, targets in batches:
        x_seq = nn.one_hot(inputs.T, model.vocab_size, dtype=model.dtype)
        loss, _ = nn.sequence_loss(model.layers, model.output, x_seq, targets.T)
        total_loss += loss
        total_tokens += inputs.size
    return total_loss / total_tokens


def train_model(
    model: LstmModel, stream: TokenStream, config: TrainConfig
) -> list[float]:
    """Run the full loop, logging the loss per epoch.

    When a checkpoint interval and path are configured, the latest state is
    written every interval epochs (and always at the end).
    """
    batches = make_batches(stream, config.seq_len, config.batch_size)
    adam_state = AdamState.for_params(model.param_arrays())
    rng = check_rng(config.seed)
    history = []
    for epoch in range(1, config.epochs + 1):
        loss = train_epoch(model, batches, adam_state, rng)
        history.append(loss)
        logger.info("epoch %d/%d: loss %.6f nats", epoch, config.epochs, loss)
        if (
            config.checkpoint_path is not None
            and config.checkpoint_interval > 0
            and epoch % config.checkpoint_interval == 0
        ):
            save_checkpoint(model, config.checkpoint_path)
    if config.checkpoint_path is not None:
        save_checkpoint(model, config.checkpoint_path)
    return history
