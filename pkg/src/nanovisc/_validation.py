"""Small argument checking helpers shared across the package."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np


def check_positive(name: str, value: float, *, allow_zero: bool = False) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if allow_zero:
        if value < 0.0:
            raise ValueError(f"{name} must be >= 0, got {value!r}")
    elif value <= 0.0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    return value


def check_in_open_interval(name: str, value: float, lo: float, hi: float) -> float:
    value = float(value)
    if not (lo < value < hi):
        raise ValueError(f"{name} must lie strictly between {lo!r} and {hi!r}, got {value!r}")
    return value


def check_int_at_least(name: str, value: int, minimum: int) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value!r}")
    return int(value)


def check_seed(name: str, value: int) -> int:
    """A master seed is an unsigned 64 bit integer."""
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if not (0 <= value < 2**64):
        raise ValueError(f"{name} must fit in an unsigned 64 bit integer, got {value!r}")
    return int(value)


def check_unit_vector(name: str, vec: Sequence[float], *, atol: float = 1e-9) -> np.ndarray:
    arr = np.asarray(vec, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > atol:
        raise ValueError(f"{name} must have unit norm within {atol} (norm was {norm!r})")
    return arr


def check_frame_count(observation_s: float, frames_per_second: float) -> int:
    """Return N = observation_s * frames_per_second, requiring it to be a positive integer."""
    raw = observation_s * frames_per_second
    n = int(round(raw))
    if n < 1 or abs(raw - n) > 1e-9 * max(1.0, abs(raw)):
        raise ValueError(
            "observation_s * frames_per_second must be a positive integer frame count, "
            f"got {raw!r}"
        )
    return n
