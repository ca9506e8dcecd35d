"""Shared symmetric linear solve with eigenvalue diagnostics.

All trainers reduce to solving H w = b for a small symmetric H.  H may
be indefinite after de-biasing, so the solve uses a symmetric
factorization (not Cholesky) and refuses numerically singular systems
instead of silently returning garbage.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = ["SingularSystemError", "solve_symmetric", "min_abs_eigenvalue"]

COND_LIMIT = 1e14


class SingularSystemError(ArithmeticError):
    """The (regularized) system matrix is numerically singular."""

    def __init__(self, message: str, min_abs_eig: float, cond: float):
        super().__init__(message)
        self.min_abs_eig = min_abs_eig
        self.cond = cond


def min_abs_eigenvalue(matrix: np.ndarray) -> float:
    """Smallest |eigenvalue| of a symmetric matrix (full eigendecomposition;
    exact and cheap for the d <= 128 sizes used here)."""
    return float(np.abs(np.linalg.eigvalsh(matrix)).min())


def solve_symmetric(matrix: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve ``matrix @ x = rhs`` for symmetric ``matrix``.

    Returns (x, min |eigenvalue|).  Raises SingularSystemError when the
    eigenvalue-based condition estimate exceeds COND_LIMIT.
    """
    eigs = np.abs(np.linalg.eigvalsh(matrix))
    lo, hi = float(eigs.min()), float(eigs.max())
    cond = np.inf if lo == 0.0 else hi / lo
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularSystemError(
            f"system is numerically singular (condition estimate {cond:.3g})",
            min_abs_eig=lo,
            cond=cond,
        )
    x = scipy.linalg.solve(matrix, rhs, assume_a="sym")
    return x, lo
