"""Random mixing before the Gaussian mechanism (RMGM-OLS).

All parties share one k-by-n Rademacher matrix B and release
B D^j / sqrt(k) + R^j.  The compressed release has k rows regardless of
n, the noise is lower-order in n, and plain least squares on the release
is consistent without any de-biasing; the Gram matrix is PSD by
construction, so the small-eigenvalue failure mode of the additive-noise
release cannot occur.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .data_model import DataMatrix, PartyPartition, validate_bounds
from .dp_core import PrivacyParams, gaussian_noise, sensitivity_bound
from .kernels import sketch_product
from .linalg import solve_symmetric
from .streams import RandomStream, as_stream

__all__ = ["RmgmRelease", "K_GRID", "choose_k", "rmgm_release", "rmgm_train"]

K_GRID: tuple[int, ...] = (100, 300, 1000, 3000, 10000)


@dataclass(frozen=True)
class RmgmRelease:
    """A k-row compressed noisy release.

    Exactly one mixing seed is stored: the shared matrix B is what makes
    the per-party blocks combinable, so a release with per-party mixing
    matrices is unrepresentable.
    """

    public_matrix: np.ndarray
    k: int
    mixing_seed: int
    noise_std: float
    party_seeds: tuple[RandomStream, ...]

    @property
    def d(self) -> int:
        return self.public_matrix.shape[1] - 1


def choose_k(
    n: int,
    sigma: float,
    d: int | None = None,
    d_max: int | None = None,
    mode: str = "synthetic",
    grid: tuple[int, ...] | None = None,
) -> int | tuple[int, ...]:
    """Select the compressed row count k.

    - "synthetic": k = max(1, round(sqrt(n)/sigma)), the scaling used for
      the convergence experiments.
    - "grid": returns the candidate list (default ``K_GRID``) for the
      harness to sweep; the best k is picked downstream by test MSE.
    - "rate": k = max(1, round(sqrt(n*d) / (sqrt(d_max)*sigma))), the
      rate-optimal scaling including the dimension factors.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if mode == "grid":
        return tuple(grid) if grid is not None else K_GRID
    if sigma <= 0:
        raise ValueError(f"sigma must be positive in {mode!r} mode, got {sigma}")
    if mode == "synthetic":
        return max(1, round(math.sqrt(n) / sigma))
    if mode == "rate":
        if d is None or d_max is None:
            raise ValueError("rate mode requires d and d_max")
        return max(1, round(math.sqrt(n * d) / (math.sqrt(d_max) * sigma)))
    raise ValueError(f"unknown k mode {mode!r}")


def rmgm_release(
    data: DataMatrix,
    partition: PartyPartition,
    priv: PrivacyParams,
    k: int,
    root_seed: int | RandomStream,
    _mixing_matrix: np.ndarray | None = None,
) -> RmgmRelease:
    """Release B D^j / sqrt(k) + R^j for every party, with one shared B.

    B is derived from child("mixing") and streamed through the product
    (never materialised); party j's noise comes from child(j).
    ``_mixing_matrix`` is a test hook injecting a fixed B; production
    callers must leave it None.
    """
    report = validate_bounds(data)
    if not report.ok:
        raise ValueError(
            f"data violates the |entry| <= 1 bound at {len(report.violations)} "
            f"position(s), first {report.violations[0]}; normalize first"
        )
    if partition.total_columns != data.values.shape[1]:
        raise ValueError("partition does not cover this matrix")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k >= data.n:
        warnings.warn(
            f"k={k} is not small relative to n={data.n}; the released noise "
            "only vanishes in the k = o(n) regime",
            stacklevel=2,
        )
    stream = as_stream(root_seed)
    mixing_seed = stream.child("mixing").seed64()
    if _mixing_matrix is not None:
        if _mixing_matrix.shape != (k, data.n):
            raise ValueError("injected mixing matrix has the wrong shape")
        mixed = _mixing_matrix @ data.values
    else:
        mixed = sketch_product(mixing_seed, data.values, k)
    mixed /= math.sqrt(k)
    noise_std = sensitivity_bound(partition.d_max) * priv.sigma
    party_streams = tuple(stream.child(j) for j in range(1, partition.m + 1))
    if noise_std > 0.0:
        for (a, b), party_stream in zip(partition.blocks, party_streams):
            noise = gaussian_noise(k, b - a, noise_std, party_stream)
            mixed[:, a:b] += noise.entries
    return RmgmRelease(
        public_matrix=mixed,
        k=k,
        mixing_seed=mixing_seed,
        noise_std=noise_std,
        party_seeds=party_streams,
    )


def rmgm_train(rel: RmgmRelease, lam: float = 1e-5) -> tuple[np.ndarray, float]:
    """Plain least squares on the compressed release.

    Solves (X'X + lam*I) w = X'Y on the public k-by-d feature block and
    returns (weights, min |eigenvalue| of the regularized Gram matrix).
    The unregularized Gram matrix is PSD by construction; a singular
    system can only arise from rank deficiency (k < d with lam = 0).
    """
    if lam < 0:
        raise ValueError(f"lam must be non-negative, got {lam}")
    x_pub = rel.public_matrix[:, :-1]
    y_pub = rel.public_matrix[:, -1]
    gram = x_pub.T @ x_pub
    system = gram + lam * np.eye(rel.d)
    weights, min_eig = solve_symmetric(system, x_pub.T @ y_pub)
    return weights, min_eig
