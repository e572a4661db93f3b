"""Small dense linear-algebra kernel.

Diagonal matrix exponentials, symmetric eigenvalue extremes and Loewner-order
comparisons. Everything here is a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DiagonalGain:
    """Hurwitz diagonal gain of the disturbance model, stored by its diagonal."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.lam, dtype=float)).copy()
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("DiagonalGain needs a non-empty 1-D array")
        if not np.all(np.isfinite(lam)):
            raise ValueError("DiagonalGain entries must be finite")
        if np.any(lam >= 0):
            raise ValueError(f"DiagonalGain must be Hurwitz (all entries < 0), got {lam}")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def p(self) -> int:
        return self.lam.size

    @classmethod
    def uniform(cls, value: float, p: int) -> "DiagonalGain":
        return cls(np.full(p, float(value)))

    def matrix(self) -> np.ndarray:
        return np.diag(self.lam)


def _lam(lam) -> np.ndarray:
    return lam.lam if isinstance(lam, DiagonalGain) else np.atleast_1d(np.asarray(lam, dtype=float))


def diag_exp_vec(lam, s: float) -> np.ndarray:
    """Diagonal of exp(s * Lambda) as a vector."""
    return np.exp(s * _lam(lam))


def diag_exp(lam, s: float) -> np.ndarray:
    """exp(s * Lambda) for diagonal Lambda, as a dense matrix."""
    return np.diag(diag_exp_vec(lam, s))


def symmetrize(M) -> np.ndarray:
    """Return (M + M^T)/2 as a float array; the result is exactly symmetric."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return 0.5 * (M + M.T)


def min_eigenvalue(M) -> float:
    M = symmetrize(M)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if M.shape[0] == 1:
        return float(M[0, 0])
    return float(np.linalg.eigvalsh(M)[0])


def max_eigenvalue(M) -> float:
    M = symmetrize(M)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if M.shape[0] == 1:
        return float(M[0, 0])
    return float(np.linalg.eigvalsh(M)[-1])


def loewner_gt(A, B, tol: float = 0.0) -> bool:
    """True iff A - B is positive definite with margin ``tol``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return min_eigenvalue(A - B) > tol
