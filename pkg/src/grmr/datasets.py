"""Synthetic point sets: independent Normal(0, 1) or Uniform(-1, 1) attributes."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .geometry import Dataset, normalize_dataset

DISTRIBUTIONS = ("normal", "uniform")


def generate(dist: str, n: int, d: int, seed: int = 42) -> Dataset:
    """Draw ``n`` points in ``d`` dimensions and min-max normalise each column to [-1, 1]."""
    if dist not in DISTRIBUTIONS:
        raise ConfigError(f"unknown distribution {dist!r}; pick one of {', '.join(DISTRIBUTIONS)}")
    if n < 1 or d < 1:
        raise ConfigError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    if dist == "normal":
        raw = rng.standard_normal((n, d))
    else:
        raw = rng.uniform(-1.0, 1.0, size=(n, d))
    return normalize_dataset(raw, names=tuple(f"a{i}" for i in range(d)))
