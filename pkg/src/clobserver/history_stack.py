"""Time-variant history stacks with incremental maintenance and sample selection.

A sample taken at instant k_j contributes

    S_j = E_j L_j^T L_j E_j,    X_j = E_j L_j^T B^T zeta_j,    E_j = exp(h Lambda (k_j - k))

to the aggregates at the current instant k. Advancing the clock by one step
multiplies S by exp(-h Lambda) on both sides and X on the left only, so the
aggregates are kept incrementally and re-derived from the samples
periodically to bound rounding drift.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .numerics import DiagonalGain, loewner_gt, symmetrize


@dataclass(frozen=True)
class HistorySample:
    instant: int
    L: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        if self.instant < 0:
            raise ValueError("sample instant must be >= 0")


def default_max_age(lam: DiagonalGain, h: float) -> int:
    """Five time constants of the slowest mode of Lambda, in steps."""
    slowest = float(np.min(np.abs(lam.lam)))
    return max(1, int(math.ceil(5.0 / (h * slowest))))


class HistoryStack:
    """Ordered queue of samples (oldest first) with aggregates S and X.

    Single writer. ``S`` and ``X`` return copies, so readers may snapshot them
    between updates.
    """

    def __init__(
        self,
        lam: DiagonalGain,
        h: float,
        max_age: Optional[int] = None,
        B: Optional[np.ndarray] = None,
        refresh_every: int = 1000,
        cancellation_tol: float = 1e-3,
    ):
        if not h > 0:
            raise ValueError("h must be positive")
        self.lam = lam
        self.h = float(h)
        self.p = lam.p
        self.max_age = default_max_age(lam, h) if max_age is None else int(max_age)
        if self.max_age < 1:
            raise ValueError("max_age must be >= 1")
        if B is not None:
            B = np.asarray(B, dtype=float)
            if B.ndim != 2 or B.shape[1] != self.p:
                raise ValueError(f"B must have {self.p} columns, got shape {B.shape}")
        self.B = B
        self.refresh_every = int(refresh_every)
        # a purge that shrinks trace(S) by more than this factor triggers a refresh
        self.cancellation_tol = cancellation_tol

        self.samples: deque[HistorySample] = deque()
        self._cross: deque[np.ndarray] = deque()  # L_j^T B^T zeta_j, unweighted
        self._S = np.zeros((self.p, self.p))
        self._X = np.zeros(self.p)
        self.current_instant = 0
        self._shift = np.exp(-self.h * lam.lam)
        self._since_refresh = 0
        self.n_refreshes = 0

    # -- read access ---------------------------------------------------------

    @property
    def S(self) -> np.ndarray:
        return self._S.copy()

    @property
    def X(self) -> np.ndarray:
        return self._X.copy()

    @property
    def depth(self) -> int:
        return len(self.samples)

    def __len__(self) -> int:
        return len(self.samples)

    def instants(self) -> list[int]:
        return [s.instant for s in self.samples]

    def weights(self, instant: int) -> np.ndarray:
        """Diagonal of exp(h Lambda (k_j - k)) for a sample taken at ``instant``."""
        return np.exp(self.h * self.lam.lam * (instant - self.current_instant))

    def reduce(self, zeta) -> np.ndarray:
        """B^T zeta (identity when the stack was built without B)."""
        zeta = np.asarray(zeta, dtype=float)
        return zeta if self.B is None else self.B.T @ zeta

    def contribution(self, index: int):
        """(S_j, X_j) of the sample at queue position ``index`` at the current instant."""
        sample = self.samples[index]
        w = self.weights(sample.instant)
        Lw = sample.L * w[None, :]
        return Lw.T @ Lw, w * self._cross[index]

    # -- updates ---------------------------------------------------------------

    def advance_and_add(self, L_new, zeta_new) -> "HistoryStack":
        """Store the sample of the current instant, then advance the clock by one."""
        L_new = np.asarray(L_new, dtype=float)
        zeta_new = np.asarray(zeta_new, dtype=float)
        if L_new.shape != (self.p, self.p):
            raise ValueError(f"L must be {self.p}x{self.p}, got {L_new.shape}")
        if not (np.all(np.isfinite(L_new)) and np.all(np.isfinite(zeta_new))):
            raise ValueError(f"non-finite sample at instant {self.current_instant}")
        cross = L_new.T @ self.reduce(zeta_new)
        if cross.shape != (self.p,):
            raise ValueError(f"zeta has incompatible shape {zeta_new.shape}")

        self.samples.append(HistorySample(self.current_instant, L_new.copy(), zeta_new.copy()))
        self._cross.append(cross)
        e = self._shift
        self._S = symmetrize((self._S + L_new.T @ L_new) * np.outer(e, e))
        self._X = e * (self._X + cross)
        self.current_instant += 1

        self._apply_age_cap()
        self._since_refresh += 1
        if self.refresh_every > 0 and self._since_refresh >= self.refresh_every:
            self.refresh()
        return self

    def _pop_oldest(self):
        S_j, X_j = self.contribution(0)
        self.samples.popleft()
        self._cross.popleft()
        self._S = symmetrize(self._S - S_j)
        self._X = self._X - X_j

    def _apply_age_cap(self) -> int:
        purged = 0
        while self.samples and self.current_instant - self.samples[0].instant > self.max_age:
            self._pop_oldest()
            purged += 1
        if not self.samples:
            self._S[:] = 0.0
            self._X[:] = 0.0
        return purged

    def select_samples(self, S_L, S_U) -> "HistoryStack":
        """Oldest-first purge keeping S just above S_L and below S_U.

        A sample is dropped when the remaining stack still dominates S_L, or
        when the current stack breaks the upper bound (forced purge). The scan
        stops at the first sample neither rule removes.
        """
        S_L = np.asarray(S_L, dtype=float)
        S_U = np.asarray(S_U, dtype=float)
        trace_before = float(np.trace(self._S))
        upper_broken = not loewner_gt(S_U, self._S)
        while self.samples:
            S_j, X_j = self.contribution(0)
            S_prime = self._S - S_j
            if loewner_gt(S_prime, S_L) or upper_broken:
                self.samples.popleft()
                self._cross.popleft()
                self._S = symmetrize(S_prime)
                self._X = self._X - X_j
                upper_broken = not loewner_gt(S_U, self._S)
            else:
                break
        self._apply_age_cap()
        if self.samples and float(np.trace(self._S)) < self.cancellation_tol * trace_before:
            self.refresh()
        return self

    def recompute_direct(self):
        """(S, X) summed sample by sample; the oracle for the incremental path."""
        S = np.zeros((self.p, self.p))
        X = np.zeros(self.p)
        if not self.samples:
            return S, X
        instants = np.array([s.instant for s in self.samples])
        W = np.exp(self.h * np.outer(instants - self.current_instant, self.lam.lam))
        Ls = np.stack([s.L for s in self.samples]) * W[:, None, :]
        S = np.einsum("jki,jkl->il", Ls, Ls)
        X = np.einsum("ji,ji->i", W, np.stack(self._cross))
        return symmetrize(S), X

    def refresh(self):
        self._S, self._X = self.recompute_direct()
        self._since_refresh = 0
        self.n_refreshes += 1


def stack_depth(stack: HistoryStack) -> int:
    return stack.depth
