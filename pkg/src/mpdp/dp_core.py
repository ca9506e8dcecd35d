"""Privacy primitives shared by both release mechanisms.

Noise-scale calibration for the Gaussian mechanism, the per-row L2
sensitivity bound for bounded party blocks, seeded Gaussian noise
matrices, and the shared Rademacher mixing matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .kernels import rademacher_matrix
from .streams import RandomStream

__all__ = [
    "PrivacyParams",
    "NoiseMatrix",
    "MixingMatrix",
    "calibrate",
    "sensitivity_bound",
    "gaussian_noise",
    "bernoulli_mixing",
]


@dataclass(frozen=True)
class PrivacyParams:
    """An (epsilon, delta) privacy budget with its derived noise scales.

    ``sigma`` is the Gaussian-mechanism multiplier sqrt(2*ln(1.25/delta))/epsilon.
    ``noise_std`` is the per-entry noise standard deviation 2*sqrt(d_max)*sigma;
    it is None until the budget is bound to a partition via :meth:`bind`.
    """

    epsilon: float
    delta: float
    sigma: float
    noise_std: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")

    def bind(self, d_max: int) -> "PrivacyParams":
        """Bind to a partition whose widest party block has d_max columns."""
        return replace(self, noise_std=sensitivity_bound(d_max) * self.sigma)


def calibrate(epsilon: float, delta: float) -> PrivacyParams:
    """Noise multiplier for an (epsilon, delta) budget.

    Requires 0 < epsilon <= 1 (the Gaussian-mechanism guarantee holds only
    in that range) and 0 < delta < 1.  Deterministic; uses natural log.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    sigma = math.sqrt(2.0 * math.log(1.25 / delta)) / epsilon
    return PrivacyParams(epsilon=float(epsilon), delta=float(delta), sigma=sigma)


def sensitivity_bound(d_max: int) -> float:
    """Per-row L2 sensitivity bound 2*sqrt(d_max) for entries bounded by 1."""
    if d_max < 1:
        raise ValueError(f"d_max must be >= 1, got {d_max}")
    return 2.0 * math.sqrt(d_max)


@dataclass(frozen=True)
class NoiseMatrix:
    """A dense matrix of i.i.d. zero-mean Gaussian draws."""

    rows: int
    cols: int
    entries: np.ndarray
    std: float


def gaussian_noise(
    rows: int,
    cols: int,
    std: float,
    rng: RandomStream | np.random.Generator,
) -> NoiseMatrix:
    """rows-by-cols matrix of independent N(0, std^2) draws.

    std = 0 yields the exact zero matrix.  The same stream always yields
    the same matrix.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    if std < 0:
        raise ValueError(f"std must be non-negative, got {std}")
    if isinstance(rng, RandomStream):
        rng = rng.generator()
    if std == 0.0:
        entries = np.zeros((rows, cols))
    else:
        entries = rng.standard_normal((rows, cols))
        entries *= std
    return NoiseMatrix(rows=rows, cols=cols, entries=entries, std=float(std))


@dataclass(frozen=True)
class MixingMatrix:
    """A k-by-n matrix of i.i.d. Rademacher (+-1) entries.

    Regenerating from the same seed yields bit-identical entries, so the
    seed alone is enough to share the matrix between parties.
    """

    k: int
    n: int
    entries: np.ndarray
    seed: int


def bernoulli_mixing(k: int, n: int, seed: int) -> MixingMatrix:
    """Materialise the seed-defined k-by-n Rademacher mixing matrix."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    return MixingMatrix(k=k, n=n, entries=rademacher_matrix(seed, k, n), seed=int(seed))
