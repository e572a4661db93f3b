"""Ground-truth-aware diagnostics: residuals, accumulated errors, PE metric,
ultimate-bound radii and per-step convergence-condition status.

None of this feeds back into the observer; it needs the true disturbance.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .history_stack import HistoryStack
from .numerics import DiagonalGain, min_eigenvalue


@dataclass(frozen=True)
class ConditionStatus:
    lower_ok: bool
    upper_ok: bool
    margin_lower: float
    margin_upper: float


@dataclass(frozen=True)
class ResidualHistory:
    """Discrete residuals xi_d(0), xi_d(1), ... stored row-wise."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_disturbance(cls, d: np.ndarray, lam: DiagonalGain, h: float) -> "ResidualHistory":
        """Residuals of a sampled disturbance sequence d[0..N]; yields N rows."""
        d = np.asarray(d, dtype=float)
        return cls(d[1:] - np.exp(h * lam.lam) * d[:-1])


def residual_discrete(d_k, d_next, lam: DiagonalGain, h: float) -> np.ndarray:
    return np.asarray(d_next, dtype=float) - np.exp(h * lam.lam) * np.asarray(d_k, dtype=float)


def residual_continuous(d_dot, d, lam: DiagonalGain) -> np.ndarray:
    return np.asarray(d_dot, dtype=float) - lam.lam * np.asarray(d, dtype=float)


def accumulated_error_discrete(
    stack: HistoryStack,
    residuals: ResidualHistory,
    kernel: Literal["exact", "printed"] = "exact",
) -> np.ndarray:
    """Stack-weighted accumulation of past residuals at the stack's current instant.

    ``kernel="exact"`` weights residual i of sample j by exp(h Lambda (k - 1 - i)),
    which is what back-propagating the disturbance model from k to k_j produces,
    so that X = h (S d(k) - xi + xi_d(k)) holds exactly on the plant.
    ``kernel="printed"`` drops that weight and sums the residuals unweighted.
    """
    k = stack.current_instant
    lam = stack.lam.lam
    h = stack.h
    vals = residuals.values
    if k >= len(residuals):
        raise IndexError(f"residual history has {len(residuals)} entries, need index {k}")
    xi = vals[k].copy()
    for idx, sample in enumerate(stack.samples):
        kj = sample.instant
        if kj < 0 or kj > k - 1:
            raise IndexError(f"sample instant {kj} outside residual range")
        seg = vals[kj:k]
        if kernel == "exact":
            ages = k - 1 - np.arange(kj, k)
            inner = np.sum(np.exp(h * np.outer(ages, lam)) * seg, axis=0)
        elif kernel == "printed":
            inner = seg.sum(axis=0)
        else:
            raise ValueError(f"unknown kernel {kernel!r}")
        S_j, _ = stack.contribution(idx)
        xi += S_j @ inner
    return xi


def uub_radius_discrete(omega: float, h: float, xi_bar: float, rho: float) -> float:
    return (1.0 / (2.0 * omega) + math.sqrt(1.0 / (4.0 * omega) + h / omega)) * (rho + 1.0) * xi_bar


def uub_radius_continuous(omega: float, xi_bar: float, rho: float) -> float:
    return (rho + 1.0) * xi_bar / omega


def pe_metric(products: Sequence[np.ndarray], h: float) -> float:
    """min eigenvalue of h * sum_i (L_i d_i)(L_i d_i)^T over a nonempty window."""
    P = np.atleast_2d(np.asarray(products, dtype=float))
    if P.shape[0] == 0:
        raise ValueError("PE window must be nonempty")
    return min_eigenvalue(h * P.T @ P)


class RunningPE:
    """Sliding-window version of :func:`pe_metric` for per-step logging."""

    def __init__(self, p: int, h: float, window_steps: int):
        self.h = h
        self.window_steps = max(1, int(window_steps))
        self._buf: deque[np.ndarray] = deque()
        self._gram = np.zeros((p, p))
        self._since_refresh = 0

    def push(self, product) -> float:
        v = np.asarray(product, dtype=float)
        self._buf.append(v)
        self._gram += np.outer(v, v)
        if len(self._buf) > self.window_steps:
            old = self._buf.popleft()
            self._gram -= np.outer(old, old)
        self._since_refresh += 1
        if self._since_refresh >= self.window_steps:
            P = np.asarray(self._buf)
            self._gram = P.T @ P
            self._since_refresh = 0
        return min_eigenvalue(self.h * self._gram)


def check_condition(S, S_L, S_U) -> ConditionStatus:
    S = np.asarray(S, dtype=float)
    lo = min_eigenvalue(S - np.asarray(S_L, dtype=float))
    up = min_eigenvalue(np.asarray(S_U, dtype=float) - S)
    return ConditionStatus(lower_ok=lo > 0, upper_ok=up > 0, margin_lower=lo, margin_upper=up)
