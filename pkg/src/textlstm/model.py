"""The trainable model bundle and its binary checkpoint format.

A checkpoint is ``TXTLSTM1``, a 4-byte little-endian header length, a JSON
header (version, vocab, hyperparameters, tensor manifest), then the raw
tensor payloads little-endian in manifest order.  Binary32 models, the
normal case, serialize as binary32; binary64 verification models record
their dtype in the manifest so a round trip is always bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_dtype, check_rng
from .nn import AdamHyper, LstmLayerParams, LstmState, SoftmaxLayerParams
from .vocabulary import Vocab

__all__ = [
    "CheckpointError",
    "ModelHyper",
    "LstmModel",
    "init_model",
    "save_checkpoint",
    "load_checkpoint",
]

CHECKPOINT_MAGIC = b"TXTLSTM1"
CHECKPOINT_VERSION = 1

_WIRE_DTYPES = {"float32": "<f4", "float64": "<f8"}


class CheckpointError(ValueError):
    pass


@dataclass
class ModelHyper:
    hidden_size: int = 128
    n_layers: int = 2
    dropout: float = 0.2
    seq_len: int = 64
    batch_size: int = 32
    learning_rate: float = 0.001
    beta_1: float = 0.9
    beta_2: float = 0.999
    epsilon: float = 1e-8
    clip_norm: float = 5.0

    def adam(self) -> AdamHyper:
        return AdamHyper(self.learning_rate, self.beta_1, self.beta_2, self.epsilon)


@dataclass
class LstmModel:
    """Stacked LSTM layers with a softmax head over one vocabulary."""

    vocab: Vocab
    layers: list[LstmLayerParams]
    output: SoftmaxLayerParams
    hyper: ModelHyper = field(default_factory=ModelHyper)
    precision: str = "float32"
    domain: str = "chord"

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    @property
    def hidden_size(self) -> int:
        return self.layers[0].hidden_size

    @property
    def dtype(self) -> np.dtype:
        return check_dtype(self.precision)

    def validate(self) -> None:
        if not self.layers:
            raise ValueError("model has no layers")
        expected_input = self.vocab_size
        for idx, layer in enumerate(self.layers):
            layer.validate()
            if layer.input_size != expected_input:
                raise ValueError(
                    f"layer {idx} expects input {layer.input_size}, "
                    f"pipeline provides {expected_input}"
                )
            expected_input = layer.hidden_size
        if self.output.w.shape != (expected_input, self.vocab_size):
            raise ValueError(
                f"output shape {self.output.w.shape} does not match "
                f"H={expected_input}, V={self.vocab_size}"
            )

    def param_names(self) -> list[str]:
        names = []
        for idx in range(len(self.layers)):
            names.extend([f"layers.{idx}.w_x", f"layers.{idx}.w_h", f"layers.{idx}.b"])
        names.extend(["output.w", "output.b"])
        return names

    def param_arrays(self) -> list[np.ndarray]:
        arrays = []
        for layer in self.layers:
            arrays.extend([layer.w_x, layer.w_h, layer.b])
        arrays.extend([self.output.w, self.output.b])
        return arrays

    def zero_states(self, batch_shape: tuple[int, ...] = ()) -> list[LstmState]:
        return [
            LstmState.zeros(layer.hidden_size, self.dtype, batch_shape)
            for layer in self.layers
        ]

    def astype(self, precision: str) -> "LstmModel":
        dtype = check_dtype(precision)
        return LstmModel(
            vocab=self.vocab,
            layers=[
                LstmLayerParams(
                    layer.w_x.astype(dtype), layer.w_h.astype(dtype), layer.b.astype(dtype)
                )
                for layer in self.layers
            ],
            output=SoftmaxLayerParams(
                self.output.w.astype(dtype), self.output.b.astype(dtype)
            ),
            hyper=self.hyper,
            precision=precision,
            domain=self.domain,
        )


def init_model(
    vocab: Vocab,
    hyper: ModelHyper | None = None,
    precision: str = "float32",
    domain: str = "chord",
    rng: int | np.random.Generator | None = None,
) -> LstmModel:
    """Fresh weights: uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero
    biases except the forget-gate block, which starts at 1.0."""
    hyper = hyper or ModelHyper()
    dtype = check_dtype(precision)
    rng = check_rng(rng)
    h = hyper.hidden_size
    layers = []
    input_size = len(vocab)
    for _ in range(hyper.n_layers):
        s_x = 1.0 / np.sqrt(input_size)
        s_h = 1.0 / np.sqrt(h)
        w_x = rng.uniform(-s_x, s_x, size=(4 * h, input_size)).astype(dtype)
        w_h = rng.uniform(-s_h, s_h, size=(4 * h, h)).astype(dtype)
        b = np.zeros(4 * h, dtype=dtype)
        b[h : 2 * h] = 1.0
        layers.append(LstmLayerParams(w_x, w_h, b))
        input_size = h
    s_out = 1.0 / np.sqrt(h)
    output = SoftmaxLayerParams(
        rng.uniform(-s_out, s_out, size=(h, len(vocab))).astype(dtype),
        np.zeros(len(vocab), dtype=dtype),
    )
    model = LstmModel(vocab, layers, output, hyper, precision, domain)
    model.validate()
    return model


def save_checkpoint(model: LstmModel, path: str | Path) -> None:
    model.validate()
    wire = _WIRE_DTYPES[model.precision]
    names = model.param_names()
    arrays = model.param_arrays()
    manifest = []
    offset = 0
    for name, arr in zip(names, arrays):
        nbytes = arr.size * np.dtype(wire).itemsize
        manifest.append(
            {
                "name": name,
                "shape": list(arr.shape),
                "dtype": model.precision,
                "offset": offset,
                "nbytes": nbytes,
            }
        )
        offset += nbytes
    header = {
        "version": CHECKPOINT_VERSION,
        "mode": model.vocab.mode,
        "domain": model.domain,
        "precision": model.precision,
        "vocab": list(model.vocab.tokens),
        "hyper": asdict(model.hyper),
        "tensors": manifest,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(len(header_bytes).to_bytes(4, "little"))
        fh.write(header_bytes)
        for arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype=wire).tobytes())


def load_checkpoint(path: str | Path) -> LstmModel:
    data = Path(path).read_bytes()
    if len(data) < len(CHECKPOINT_MAGIC) + 4:
        raise CheckpointError("file too short to be a checkpoint")
    if data[: len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise CheckpointError("bad magic: not a textlstm checkpoint")
    header_start = len(CHECKPOINT_MAGIC) + 4
    header_len = int.from_bytes(data[len(CHECKPOINT_MAGIC) : header_start], "little")
    if header_start + header_len > len(data):
        raise CheckpointError("truncated header")
    try:
        header = json.loads(data[header_start : header_start + header_len])
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"unreadable header: {exc}") from exc
    if header.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {header.get('version')}")

    precision = header["precision"]
    if precision not in _WIRE_DTYPES:
        raise CheckpointError(f"unknown precision {precision!r}")
    tokens = header["vocab"]
    vocab = Vocab(
        mode=header["mode"],
        tokens=tuple(tokens),
        index={t: i for i, t in enumerate(tokens)},
    )
    hyper = ModelHyper(**header["hyper"])

    payload = data[header_start + header_len :]
    tensors: dict[str, np.ndarray] = {}
    for entry in header["tensors"]:
        wire = _WIRE_DTYPES.get(entry.get("dtype", "float32"))
        if wire is None:
            raise CheckpointError(f"unknown tensor dtype in {entry['name']}")
        shape = tuple(entry["shape"])
        expected = int(np.prod(shape)) * np.dtype(wire).itemsize if shape else np.dtype(wire).itemsize
        if expected != entry["nbytes"]:
            raise CheckpointError(
                f"tensor {entry['name']}: manifest nbytes {entry['nbytes']} "
                f"does not match shape {shape}"
            )
        start, stop = entry["offset"], entry["offset"] + entry["nbytes"]
        if stop > len(payload):
            raise CheckpointError(f"tensor {entry['name']}: payload truncated")
        tensors[entry["name"]] = np.frombuffer(
            payload[start:stop], dtype=wire
        ).reshape(shape).copy()

    n_layers = hyper.n_layers
    try:
        layers = [
            LstmLayerParams(
                tensors[f"layers.{i}.w_x"],
                tensors[f"layers.{i}.w_h"],
                tensors[f"layers.{i}.b"],
            )
            for i in range(n_layers)
        ]
        output = SoftmaxLayerParams(tensors["output.w"], tensors["output.b"])
    except KeyError as exc:
        raise CheckpointError(f"missing tensor {exc}") from exc
    model = LstmModel(
        vocab=vocab,
        layers=layers,
        output=output,
        hyper=hyper,
        precision=precision,
        domain=header.get("domain", "chord"),
    )
    try:
        model.validate()
    except ValueError as exc:
        raise CheckpointError(f"inconsistent checkpoint: {exc}") from exc
    return model
