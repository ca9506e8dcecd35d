"""Synthetic regression data with a known ground-truth weight vector.

Features are i.i.d. uniform on [-1, 1]; weights are uniform on
[-1/d, 1/d], so labels y = w.x satisfy |y| <= 1 without clipping and the
bounded-entries requirement holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_model import DataMatrix
from .streams import RandomStream

__all__ = ["GroundTruth", "gen_ground_truth", "gen_dataset"]


@dataclass(frozen=True)
class GroundTruth:
    """The generating weight vector; every |w_i| <= 1/d."""

    w_star: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.w_star, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("w_star must be a non-empty vector")
        object.__setattr__(self, "w_star", w)

    @property
    def d(self) -> int:
        return self.w_star.size


def gen_ground_truth(d: int, rng: RandomStream | np.random.Generator) -> GroundTruth:
    """d independent U(-1/d, 1/d) draws."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if isinstance(rng, RandomStream):
        rng = rng.generator()
    return GroundTruth(rng.uniform(-1.0 / d, 1.0 / d, size=d))


def gen_dataset(
    n: int,
    truth: GroundTruth,
    rng: RandomStream | np.random.Generator,
    label_noise: float = 0.0,
) -> DataMatrix:
    """n rows of U(-1, 1) features with noiseless labels y = w.x.

    ``label_noise`` optionally adds N(0, label_noise^2) to the labels for
    robustness experiments; the default 0 is the reference protocol and
    the only setting the convergence guarantees describe.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if isinstance(rng, RandomStream):
        rng = rng.generator()
    features = rng.uniform(-1.0, 1.0, size=(n, truth.d))
    labels = features @ truth.w_star
    if label_noise:
        labels = labels + rng.normal(0.0, label_noise, size=n)
    names = tuple(f"x{i + 1}" for i in range(truth.d)) + ("y",)
    return DataMatrix(np.column_stack([features, labels]), names)
