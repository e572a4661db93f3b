"""Systems already given in regular form, plus the concrete example plants.

A :class:`RegularSystem` only describes the z-subsystem that the observer
sees, ``z' = gamma(x, u) + B L(x) d``. The internal dynamics of the
non-observed coordinates never enter the observer and are not modeled.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class RegularSystem:
    n: int
    r: int
    p: int
    psi: Callable[[np.ndarray], np.ndarray]
    gamma: Callable[[np.ndarray, np.ndarray], np.ndarray]
    gain: Callable[[np.ndarray], np.ndarray]
    B: np.ndarray
    # Jacobian of psi; None means psi is the identity embedding (r == n).
    psi_jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not (1 <= self.p <= self.r <= self.n):
            raise ValueError(f"need 1 <= p <= r <= n, got p={self.p}, r={self.r}, n={self.n}")
        B = np.array(self.B, dtype=float)
        if B.shape != (self.r, self.p):
            raise ValueError(f"B must be {self.r}x{self.p}, got {B.shape}")
        if not np.allclose(B.T @ B, np.eye(self.p), atol=1e-12):
            raise ValueError("B must have orthonormal columns (B^T B = I)")
        if self.psi_jacobian is None and self.r != self.n:
            raise ValueError("psi_jacobian is required unless psi is the identity (r == n)")
        B.setflags(write=False)
        object.__setattr__(self, "B", B)

    def jacobian(self, x) -> np.ndarray:
        if self.psi_jacobian is None:
            return np.eye(self.n)
        return np.asarray(self.psi_jacobian(x), dtype=float)


def build_canonical_abc(r_list: Sequence[int]):
    """Block-diagonal integrator chains (A, B, C) for relative degrees ``r_list``.

    Block i is a shift of size r_i; the disturbance channel i enters the last
    state of chain i and the output picks its first state.
    """
    r_list = [int(r) for r in r_list]
    if not r_list:
        raise ValueError("r_list must be non-empty")
    if any(r < 1 for r in r_list):
        raise ValueError(f"all relative degrees must be >= 1, got {r_list}")
    p = len(r_list)
    r = sum(r_list)
    A = np.zeros((r, r))
    B = np.zeros((r, p))
    C = np.zeros((p, r))
    offset = 0
    for i, ri in enumerate(r_list):
        A[offset:offset + ri, offset:offset + ri] = np.eye(ri, k=1)
        B[offset + ri - 1, i] = 1.0
        C[i, offset] = 1.0
        offset += ri
    return A, B, C


# --- networked SIS epidemic -------------------------------------------------

@dataclass(frozen=True)
class SISModel:
    W: np.ndarray
    curing_baseline: np.ndarray
    h: float

    def __post_init__(self):
        W = np.array(self.W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError(f"adjacency must be square, got {W.shape}")
        if np.any(W < 0):
            raise ValueError("adjacency weights must be nonnegative")
        if np.any(np.diag(W) != 0):
            raise ValueError("adjacency must have no self-loops (zero diagonal)")
        delta = np.broadcast_to(np.asarray(self.curing_baseline, dtype=float), (W.shape[0],)).copy()
        if np.any(delta < 0):
            raise ValueError("baseline curing rates must be nonnegative")
        if not self.h > 0:
            raise ValueError("sampling period h must be positive")
        W.setflags(write=False)
        delta.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "curing_baseline", delta)

    @property
    def n(self) -> int:
        return self.W.shape[0]


def sis_gain(x, W) -> np.ndarray:
    """Disturbance gain (I - diag(x)) W diag(x)."""
    x = np.asarray(x, dtype=float)
    return (1.0 - x)[:, None] * np.asarray(W, dtype=float) * x[None, :]


def _check_dims(n: int, **vectors):
    for name, v in vectors.items():
        if np.shape(v) != (n,):
            raise ValueError(f"{name} has shape {np.shape(v)}, expected ({n},)")


def sis_vector_field(x, delta, d, W) -> np.ndarray:
    """Continuous-time SIS right-hand side."""
    x = np.asarray(x, dtype=float)
    return sis_gain(x, W) @ np.asarray(d, dtype=float) - x * np.asarray(delta, dtype=float)


def sis_update(x, delta, d, model: SISModel):
    """One discrete SIS step; returns (next_state, number of clamped entries)."""
    x = np.asarray(x, dtype=float)
    delta = np.asarray(delta, dtype=float)
    d = np.asarray(d, dtype=float)
    _check_dims(model.n, x=x, delta=delta, d=d)
    raw = x + model.h * ((1.0 - x) * (model.W @ (d * x)) - delta * x)
    clipped = np.clip(raw, 0.0, 1.0)
    return clipped, int(np.count_nonzero(clipped != raw))


def sis_step(x, delta, d, model: SISModel) -> np.ndarray:
    return sis_update(x, delta, d, model)[0]


def _identity(x):
    return np.asarray(x, dtype=float)


def _sis_gamma(x, u):
    return -np.asarray(x, dtype=float) * np.asarray(u, dtype=float)


def sis_regular(model: SISModel) -> RegularSystem:
    """The SIS model is already regular: psi = id, B = I, u is the curing rate."""
    n = model.n
    return RegularSystem(
        n=n, r=n, p=n,
        psi=_identity,
        gamma=_sis_gamma,
        gain=partial(sis_gain, W=model.W),
        B=np.eye(n),
    )


def load_adjacency_csv(path) -> np.ndarray:
    path = Path(path)
    try:
        W = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError as exc:
        raise OSError(f"cannot read adjacency file {path}: {exc}") from exc
    if W.shape[0] != W.shape[1]:
        raise ValueError(f"{path}: adjacency must be square, got {W.shape}")
    return W


# --- population model -------------------------------------------------------

def population_step(x, b, H, F, w, h: float) -> np.ndarray:
    """Explicit-Euler step of x' = H x + diag(x) F b + w, floored at zero."""
    x = np.asarray(x, dtype=float)
    n = x.size
    H = np.asarray(H, dtype=float)
    F = np.asarray(F, dtype=float)
    b = np.asarray(b, dtype=float)
    w = np.broadcast_to(np.asarray(w, dtype=float), (n,))
    if H.shape != (n, n) or F.shape[0] != n or F.shape[1] != b.size:
        raise ValueError(f"dimension mismatch: x {x.shape}, H {H.shape}, F {F.shape}, b {b.shape}")
    return np.maximum(x + h * (H @ x + x * (F @ b) + w), 0.0)


def population_regular(H, w) -> RegularSystem:
    """Population model in regular form, with the fertility F b as disturbance.

    The input u is the migration vector; pass ``w`` as a default when u is None.
    """
    H = np.asarray(H, dtype=float)
    n = H.shape[0]
    w = np.broadcast_to(np.asarray(w, dtype=float), (n,)).copy()

    def gamma(x, u=None):
        mig = w if u is None else np.asarray(u, dtype=float)
        return H @ np.asarray(x, dtype=float) + mig

    return RegularSystem(
        n=n, r=n, p=n,
        psi=_identity,
        gamma=gamma,
        gain=lambda x: np.diag(np.asarray(x, dtype=float)),
        B=np.eye(n),
    )
