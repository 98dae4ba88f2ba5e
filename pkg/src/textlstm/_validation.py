"""Shared input-validation helpers."""

from __future__ import annotations

import numpy as np

FLOAT_DTYPES = {"float32": np.float32, "float64": np.float64}


def check_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Return a PCG64 Generator from a seed, or pass a Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def check_dtype(precision: str) -> np.dtype:
    if precision not in FLOAT_DTYPES:
        raise ValueError(
            f"precision must be one of {sorted(FLOAT_DTYPES)}, got {precision!r}"
        )
    return np.dtype(FLOAT_DTYPES[precision])


def check_finite(name: str, arr: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_rate(rate: float) -> float:
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    return rate


def check_alpha(alpha: float) -> float:
    """Diversity exponents are accepted on (0, 10]."""
    if not 0.0 < alpha <= 10.0:
        raise ValueError(f"alpha must be in (0, 10], got {alpha}")
    return float(alpha)
