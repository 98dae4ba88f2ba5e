"""Numeric kernels: LSTM cell, softmax head, dropout, Adam, gradient checking.

Everything operates on plain numpy arrays and works in either binary32
(training/generation) or binary64 (verification).  Vector arguments may
carry a leading batch axis; the math broadcasts over it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._validation import check_finite, check_rate, check_rng

__all__ = [
    "LstmLayerParams",
    "LstmState",
    "LstmCellCache",
    "SoftmaxLayerParams",
    "AdamHyper",
    "AdamState",
    "lstm_cell_forward",
    "lstm_cell_backward",
    "softmax_forward",
    "softmax_xent_forward",
    "softmax_xent_backward",
    "dropout",
    "dropout_mask",
    "adam_step",
    "one_hot",
    "sequence_loss",
    "sequence_backward",
    "grad_check",
]


@dataclass
class LstmLayerParams:
    """One LSTM layer: gate blocks stacked as input, forget, candidate, output."""

    w_x: np.ndarray  # (4H, D)
    w_h: np.ndarray  # (4H, H)
    b: np.ndarray  # (4H,)

    @property
    def hidden_size(self) -> int:
        return self.w_h.shape[1]

    @property
    def input_size(self) -> int:
        return self.w_x.shape[1]

    def validate(self) -> None:
        h = self.hidden_size
        if self.w_x.shape[0] != 4 * h or self.w_h.shape != (4 * h, h):
            raise ValueError(
                f"inconsistent layer shapes: w_x {self.w_x.shape}, w_h {self.w_h.shape}"
            )
        if self.b.shape != (4 * h,):
            raise ValueError(f"bias shape {self.b.shape} does not match 4H={4 * h}")


@dataclass
class LstmState:
    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(
        cls, hidden_size: int, dtype: np.dtype, batch_shape: tuple[int, ...] = ()
    ) -> "LstmState":
        shape = batch_shape + (hidden_size,)
        return cls(np.zeros(shape, dtype=dtype), np.zeros(shape, dtype=dtype))


@dataclass
class LstmCellCache:
    """Activations recorded by the forward pass for the matching backward."""

    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    tanh_c: np.ndarray


@dataclass
class SoftmaxLayerParams:
    w: np.ndarray  # (H, V)
    b: np.ndarray  # (V,)

    @property
    def vocab_size(self) -> int:
        return self.b.shape[0]


@dataclass
class AdamHyper:
    learning_rate: float = 0.001
    beta_1: float = 0.9
    beta_2: float = 0.999
    epsilon: float = 1e-8


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def for_params(cls, params: list[np.ndarray]) -> "AdamState":
        return cls(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def lstm_cell_forward(
    x: np.ndarray, state: LstmState, params: LstmLayerParams
) -> tuple[LstmState, LstmCellCache]:
    """One LSTM step: gates from W_x.x + W_h.h + b, then the cell update."""
    params.validate()
    h_size = params.hidden_size
    if x.shape[-1] != params.input_size:
        raise ValueError(
            f"input size {x.shape[-1]} does not match layer input dim {params.input_size}"
        )
    if state.h.shape[-1] != h_size or state.c.shape != state.h.shape:
        raise ValueError("state shape does not match layer hidden size")
    check_finite("x", x)

    a = x @ params.w_x.T + state.h @ params.w_h.T + params.b
    i = expit(a[..., :h_size])
    f = expit(a[..., h_size : 2 * h_size])
    g = np.tanh(a[..., 2 * h_size : 3 * h_size])
    o = expit(a[..., 3 * h_size :])
    c = f * state.c + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    cache = LstmCellCache(x, state.h, state.c, i, f, g, o, tanh_c)
    return LstmState(h, c), cache


def _outer_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Outer product a (…,G) x b (…,D) -> (G,D), summed over leading axes."""
    if a.ndim == 1:
        return np.outer(a, b)
    return a.reshape(-1, a.shape[-1]).T @ b.reshape(-1, b.shape[-1])


def _batch_sum(a: np.ndarray) -> np.ndarray:
    """Sum away any leading batch axes, keeping the last."""
    if a.ndim == 1:
        return a.copy()
    return a.reshape(-1, a.shape[-1]).sum(axis=0)


def lstm_cell_backward(
    grad_h: np.ndarray,
    grad_c: np.ndarray,
    cache: LstmCellCache,
    params: LstmLayerParams,
) -> tuple[np.ndarray, LstmState, LstmLayerParams]:
    """Exact gradients of one cell step.

    Returns (grad_x, grad w.r.t. previous state, per-parameter gradients
    packed in an LstmLayerParams of the same shapes).
    """
    h_size = params.hidden_size
    if cache.i.shape[-1] != h_size or cache.x.shape[-1] != params.input_size:
        raise ValueError("cache does not match layer dimensions")
    if grad_h.shape != cache.i.shape or grad_c.shape != cache.i.shape:
        raise ValueError("output gradients do not match cached activation shapes")

    d_o = grad_h * cache.tanh_c
    d_c = grad_c + grad_h * cache.o * (1.0 - cache.tanh_c**2)
    d_i = d_c * cache.g
    d_g = d_c * cache.i
    d_f = d_c * cache.c_prev
    d_c_prev = d_c * cache.f

    da = np.concatenate(
        [
            d_i * cache.i * (1.0 - cache.i),
            d_f * cache.f * (1.0 - cache.f),
            d_g * (1.0 - cache.g**2),
            d_o * cache.o * (1.0 - cache.o),
        ],
        axis=-1,
    )
    grads = LstmLayerParams(
        w_x=_outer_sum(da, cache.x),
        w_h=_outer_sum(da, cache.h_prev),
        b=_batch_sum(da),
    )
    grad_x = da @ params.w_x
    grad_h_prev = da @ params.w_h
    return grad_x, LstmState(grad_h_prev, d_c_prev), grads


def softmax_forward(h: np.ndarray, params: SoftmaxLayerParams) -> np.ndarray:
    """Output distribution softmax(h.W + b), max-subtracted for stability."""
    logits = h @ params.w + params.b
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_xent_forward(
    h: np.ndarray, params: SoftmaxLayerParams, target: int | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities and cross-entropy loss (nats) for the given target index."""
    target = np.asarray(target)
    if np.any(target < 0) or np.any(target >= params.vocab_size):
        raise IndexError(f"target out of range [0, {params.vocab_size})")
    logits = h @ params.w + params.b
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    z = e.sum(axis=-1, keepdims=True)
    probs = e / z
    # loss via log-sum-exp, never through log(probs), so a saturated
    # distribution cannot produce log(0).
    target_shifted = np.take_along_axis(
        shifted, target.reshape(target.shape + (1,)), axis=-1
    )[..., 0]
    loss = np.log(z[..., 0]) - target_shifted
    return probs, loss


def softmax_xent_backward(probs: np.ndarray, target: int | np.ndarray) -> np.ndarray:
    """Gradient of the cross-entropy w.r.t. the logits: probs - onehot(target)."""
    target = np.asarray(target)
    grad = probs.copy()
    np.put_along_axis(
        grad,
        target.reshape(target.shape + (1,)),
        np.take_along_axis(grad, target.reshape(target.shape + (1,)), axis=-1) - 1.0,
        axis=-1,
    )
    return grad


def dropout_mask(
    shape: tuple[int, ...],
    rate: float,
    rng: np.random.Generator,
    dtype: np.dtype = np.float64,
) -> np.ndarray:
    """Inverted-dropout mask: zeros with probability rate, survivors 1/(1-rate)."""
    check_rate(rate)
    keep = rng.random(shape) >= rate
    return keep.astype(dtype) / (1.0 - rate)


def dropout(
    h: np.ndarray,
    rate: float,
    rng: int | np.random.Generator | None = None,
    training: bool = True,
) -> np.ndarray:
    """Apply inverted dropout in training mode; identity at inference."""
    check_rate(rate)
    if not training or rate == 0.0:
        return h
    return h * dropout_mask(h.shape, rate, check_rng(rng), h.dtype)


def adam_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: AdamState,
    hyper: AdamHyper | None = None,
) -> tuple[list[np.ndarray], AdamState]:
    """Bias-corrected Adam update, in place on params.

    Rejects non-finite gradients so a diverged training run fails loudly
    instead of spraying NaN into the weights.
    """
    hyper = hyper or AdamHyper()
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ValueError("params, grads and Adam state must have matching lengths")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ValueError(f"gradient shape {g.shape} does not match param {p.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite gradient: training has diverged")

    state.t += 1
    t = state.t
    bc1 = 1.0 - hyper.beta_1**t
    bc2 = 1.0 - hyper.beta_2**t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= hyper.beta_1
        m += (1.0 - hyper.beta_1) * g
        v *= hyper.beta_2
        v += (1.0 - hyper.beta_2) * g**2
        p -= hyper.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + hyper.epsilon)
    return params, state


def one_hot(indices: np.ndarray, size: int, dtype: np.dtype = np.float32) -> np.ndarray:
    indices = np.asarray(indices)
    out = np.zeros(indices.shape + (size,), dtype=dtype)
    np.put_along_axis(out, indices.reshape(indices.shape + (1,)), 1.0, axis=-1)
    return out


def sequence_loss(
    layers: list[LstmLayerParams],
    output: SoftmaxLayerParams,
    x_seq: np.ndarray,
    targets: np.ndarray,
    layer_masks: list[np.ndarray] | None = None,
) -> tuple[float, list]:
    """Forward a window through the stacked cells and the softmax head.

    x_seq is (T, ..., D) one-hot input, targets (T, ...).  The initial state
    is zero.  layer_masks, when given, holds one (T, ..., H) dropout mask per
    layer, applied to that layer's output at every step.  Returns the summed
    cross-entropy and the per-step caches backward needs.
    """
    n_steps = x_seq.shape[0]
    if n_steps == 0:
        raise ValueError("empty sequence")
    if targets.shape[0] != n_steps:
        raise ValueError("inputs and targets must have the same length")
    dtype = x_seq.dtype
    batch_shape = x_seq.shape[1:-1]
    states = [
        LstmState.zeros(layer.hidden_size, dtype, batch_shape) for layer in layers
    ]
    caches = []
    total = 0.0
    for t in range(n_steps):
        inp = x_seq[t]
        cell_caches = []
        for idx, layer in enumerate(layers):
            states[idx], cache = lstm_cell_forward(inp, states[idx], layer)
            cell_caches.append(cache)
            inp = states[idx].h
            if layer_masks is not None:
                inp = inp * layer_masks[idx][t]
        probs, loss = softmax_xent_forward(inp, output, targets[t])
        total += float(loss.sum())
        caches.append((cell_caches, inp, probs))
    return total, caches


def sequence_backward(
    layers: list[LstmLayerParams],
    output: SoftmaxLayerParams,
    caches: list,
    targets: np.ndarray,
    layer_masks: list[np.ndarray] | None = None,
) -> list[np.ndarray]:
    """Backpropagation through time over one window.

    Returns gradients of the summed loss, ordered as
    [layer0.w_x, layer0.w_h, layer0.b, layer1..., output.w, output.b].
    """
    n_steps = len(caches)
    layer_grads = [
        LstmLayerParams(
            np.zeros_like(layer.w_x), np.zeros_like(layer.w_h), np.zeros_like(layer.b)
        )
        for layer in layers
    ]
    d_out_w = np.zeros_like(output.w)
    d_out_b = np.zeros_like(output.b)
    last_cells = caches[-1][0]
    d_next = [
        (np.zeros_like(last_cells[idx].i), np.zeros_like(last_cells[idx].i))
        for idx in range(len(layers))
    ]
    for t in reversed(range(n_steps)):
        cell_caches, top_input, probs = caches[t]
        d_logits = softmax_xent_backward(probs, targets[t])
        d_out_w += _outer_sum(top_input, d_logits)
        d_out_b += _batch_sum(d_logits)
        d_into = d_logits @ output.w.T
        for idx in reversed(range(len(layers))):
            if layer_masks is not None:
                d_into = d_into * layer_masks[idx][t]
            d_h = d_into + d_next[idx][0]
            d_c = d_next[idx][1]
            d_x, d_prev, grads = lstm_cell_backward(
                d_h, d_c, cell_caches[idx], layers[idx]
            )
            layer_grads[idx].w_x += grads.w_x
            layer_grads[idx].w_h += grads.w_h
            layer_grads[idx].b += grads.b
            d_next[idx] = (d_prev.h, d_prev.c)
            d_into = d_x
    out: list[np.ndarray] = []
    for g in layer_grads:
        out.extend([g.w_x, g.w_h, g.b])
    out.extend([d_out_w, d_out_b])
    return out


def grad_check(
    model,
    sample: tuple[np.ndarray, np.ndarray],
    epsilon: float = 1e-5,
    coords_per_tensor: int = 200,
    seed: int = 0,
    rel_floor: float = 1e-4,
) -> float:
    """Compare full-network analytic gradients against central differences.

    The model must be in binary64 mode.  A random subset of coordinates
    (coords_per_tensor per tensor, or all when the tensor is smaller) is
    perturbed by +/-epsilon.  Returns the maximum relative error
    |analytic - numeric| / max(|analytic|, |numeric|, rel_floor).
    """
    if model.precision != "float64":
        raise ValueError("gradient check requires a binary64 model")
    inputs, targets = sample
    inputs = np.asarray(inputs)
    targets = np.asarray(targets)
    if inputs.size == 0:
        raise ValueError("gradient check sample must contain at least one token")
    if inputs.shape != targets.shape:
        raise ValueError("inputs and targets must have the same length")

    vocab_size = model.output.vocab_size
    x_seq = one_hot(inputs, vocab_size, dtype=np.float64)
    params = model.param_arrays()
    _, caches = sequence_loss(model.layers, model.output, x_seq, targets)
    analytic = sequence_backward(model.layers, model.output, caches, targets)

    rng = check_rng(seed)
    worst = 0.0
    for tensor, grad in zip(params, analytic):
        flat = tensor.reshape(-1)
        n = flat.size
        coords = (
            np.arange(n)
            if n <= coords_per_tensor
            else rng.choice(n, size=coords_per_tensor, replace=False)
        )
        for k in coords:
            orig = flat[k]
            flat[k] = orig + epsilon
            plus, _ = sequence_loss(model.layers, model.output, x_seq, targets)
            flat[k] = orig - epsilon
            minus, _ = sequence_loss(model.layers, model.output, x_seq, targets)
            flat[k] = orig
            numeric = (plus - minus) / (2.0 * epsilon)
            a = grad.reshape(-1)[k]
            rel = abs(a - numeric) / max(abs(a), abs(numeric), rel_floor)
            worst = max(worst, rel)
    return worst
