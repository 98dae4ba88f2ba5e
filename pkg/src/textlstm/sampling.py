"""Stochastic generation with a tunable diversity exponent.

Before each draw, the output distribution p is reweighted to
p_i^(1/alpha), renormalized: alpha < 1 sharpens it toward the likely
continuation, alpha > 1 flattens it toward rarer events.  A schedule can
assign different alphas to regions of the generated sequence, which is how
user-placed fill-ins work for drum tracks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_alpha, check_rng
from . import nn
from .model import LstmModel
from .nn import LstmState
from .vocabulary import TokenStream

__all__ = [
    "AlphaRegion",
    "AlphaSchedule",
    "GenerationRequest",
    "reweight",
    "sample_next",
    "generate",
]


@dataclass(frozen=True)
class AlphaRegion:
    """Half-open [start, end) span of generated-token indices."""

    start: int
    end: int
    alpha: float

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError(f"region start must be >= 0, got {self.start}")
        if self.end <= self.start:
            raise ValueError(f"region end {self.end} must exceed start {self.start}")
        check_alpha(self.alpha)


@dataclass(frozen=True)
class AlphaSchedule:
    default_alpha: float = 1.0
    regions: tuple[AlphaRegion, ...] = ()

    def __post_init__(self) -> None:
        check_alpha(self.default_alpha)
        regions = tuple(
            r if isinstance(r, AlphaRegion) else AlphaRegion(*r) for r in self.regions
        )
        object.__setattr__(self, "regions", regions)
        ordered = sorted(regions, key=lambda r: r.start)
        for a, b in zip(ordered, ordered[1:]):
            if b.start < a.end:
                raise ValueError(
                    f"alpha regions overlap: [{a.start}, {a.end}) and "
                    f"[{b.start}, {b.end})"
                )
        object.__setattr__(self, "regions", tuple(ordered))

    def alpha_at(self, index: int) -> float:
        for region in self.regions:
            if region.start <= index < region.end:
                return region.alpha
        return self.default_alpha


@dataclass
class GenerationRequest:
    seed_text: str
    length: int
    schedule: AlphaSchedule = field(default_factory=AlphaSchedule)
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError(f"length must be >= 0, got {self.length}")


def reweight(probs: np.ndarray, alpha: float) -> np.ndarray:
    """p_i^(1/alpha), renormalized to a distribution.

    Exact zeros stay zero (they never go through a log), and the ranking of
    entries is preserved for every positive alpha.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    probs = np.asarray(probs, dtype=np.float64)
    if np.any(probs < 0):
        raise ValueError("probabilities must be non-negative")
    weighted = probs ** (1.0 / alpha)
    total = weighted.sum()
    if total <= 0 or not np.isfinite(total):
        raise ValueError("cannot reweight: distribution has no positive mass")
    return weighted / total


def _advance(
    model: LstmModel, states: list[LstmState], token: int
) -> tuple[list[LstmState], np.ndarray]:
    """One inference step through the stack (dropout off)."""
    x = nn.one_hot(np.asarray(token), model.vocab_size, dtype=model.dtype)
    new_states = []
    for state, layer in zip(states, model.layers):
        state, _ = nn.lstm_cell_forward(x, state, layer)
        new_states.append(state)
        x = state.h
    return new_states, x


def sample_next(
    model: LstmModel,
    states: list[LstmState],
    token: int,
    alpha: float,
    rng: np.random.Generator,
) -> tuple[int, list[LstmState]]:
    """Advance one step and draw the next token from the reweighted output.

    Uses a single uniform draw and the inverse CDF, so a run is fully
    reproducible from the generator's seed.
    """
    states, top = _advance(model, states, token)
    probs = reweight(nn.softmax_forward(top, model.output), alpha)
    r = rng.random()
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, r, side="right"))
    return min(idx, len(probs) - 1), states


def generate(model: LstmModel, request: GenerationRequest) -> TokenStream:
    """Autoregressive sampling after a teacher-forced pass over the seed.

    Generated index i is drawn with the schedule's alpha for i.  Flags are
    ordinary tokens; generation always returns exactly request.length
    tokens.
    """
    vocab = model.vocab
    if request.length == 0:
        return TokenStream(np.empty(0, dtype=np.int64), vocab)
    seed_stream = vocab.encode(request.seed_text)
    if len(seed_stream) == 0:
        raise ValueError("generation needs at least one seed token")
    rng = check_rng(request.seed)
    states = model.zero_states()
    seed_indices = seed_stream.indices
    for token in seed_indices[:-1]:
        states, _ = _advance(model, states, int(token))
    last = int(seed_indices[-1])
    out = np.empty(request.length, dtype=np.int64)
    for i in range(request.length):
        last, states = sample_next(
            model, states, last, request.schedule.alpha_at(i), rng
        )
        out[i] = last
    return TokenStream(out, vocab)
