"""Feedforward compensation of the estimated infection rates through the curing rates."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ControlConfig:
    delta_baseline: np.ndarray
    epsilon: float = 1e-3
    delta_max: Optional[float] = None  # None -> 10 * max(delta_baseline)

    def __post_init__(self):
        base = np.atleast_1d(np.asarray(self.delta_baseline, dtype=float)).copy()
        if np.any(base < 0):
            raise ValueError("baseline curing rates must be nonnegative")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        dmax = 10.0 * float(base.max()) if self.delta_max is None else float(self.delta_max)
        if not dmax > base.max():
            raise ValueError("delta_max must exceed every baseline curing rate")
        base.setflags(write=False)
        object.__setattr__(self, "delta_baseline", base)
        object.__setattr__(self, "delta_max", dmax)


def compensate(x, d_hat, W, cfg: ControlConfig) -> np.ndarray:
    """delta_i = base_i + (1 - x_i) sum_j w_ij d_hat_j x_j / max(x_i, eps), clipped to [0, delta_max]."""
    x = np.asarray(x, dtype=float)
    d_hat = np.asarray(d_hat, dtype=float)
    W = np.asarray(W, dtype=float)
    n = x.size
    if d_hat.shape != (n,) or W.shape != (n, n) or cfg.delta_baseline.shape not in ((n,), (1,)):
        raise ValueError("dimension mismatch between state, estimate, adjacency and baseline")
    infection = (1.0 - x) * (W @ (d_hat * x))
    delta = cfg.delta_baseline + infection / np.maximum(x, cfg.epsilon)
    return np.clip(delta, 0.0, cfg.delta_max)
