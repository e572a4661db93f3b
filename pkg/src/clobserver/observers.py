"""Concurrent-learning disturbance observer, discrete and continuous time.

Discrete update:   d_hat(k+1) = (exp(h Lambda) - kappa h S) d_hat(k) + kappa X
Continuous update: d_hat' = (Lambda - kappa S) d_hat + kappa X, integrated with
S and X held constant over each substep.

The difference terms carry the sign under which zeta = h B L(x) d on the exact
discrete plant (zeta = B L(x) d in continuous time).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .history_stack import HistoryStack
from .numerics import DiagonalGain, loewner_gt
from .systems import RegularSystem

DIVERGENCE_NORM = 1e12


class DivergenceError(RuntimeError):
    """Observer estimate became non-finite or exceeded the divergence norm."""

    def __init__(self, step, message: str = ""):
        self.step = step
        super().__init__(message or f"observer diverged at step {step}")


class InfeasibleBoundsError(ValueError):
    """h * omega > 1/4: the stack bounds have no real solution."""


@dataclass(frozen=True)
class ObserverConfig:
    kappa: float
    lam: DiagonalGain
    h: float
    omega: float
    mode: Literal["cl", "conventional"] = "cl"

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not self.h > 0:
            raise ValueError("h must be positive")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.mode not in ("cl", "conventional"):
            raise ValueError(f"unknown observer mode {self.mode!r}")
        if not isinstance(self.lam, DiagonalGain):
            object.__setattr__(self, "lam", DiagonalGain(self.lam))

    @property
    def p(self) -> int:
        return self.lam.p


@dataclass
class ObserverState:
    d_hat: np.ndarray
    stack: HistoryStack
    step: int = 0


def new_observer(cfg: ObserverConfig, B=None, max_age: Optional[int] = None,
                 refresh_every: int = 1000) -> ObserverState:
    """Zero-initialized observer; conventional mode keeps only the latest sample."""
    if cfg.mode == "conventional":
        max_age = 1
    stack = HistoryStack(cfg.lam, cfg.h, max_age=max_age, B=B, refresh_every=refresh_every)
    return ObserverState(d_hat=np.zeros(cfg.p), stack=stack)


def zeta_discrete(x_k, x_next, u_k, sys: RegularSystem, h: float) -> np.ndarray:
    x_k = np.asarray(x_k, dtype=float)
    x_next = np.asarray(x_next, dtype=float)
    if x_k.shape != (sys.n,) or x_next.shape != (sys.n,):
        raise ValueError(f"states must have shape ({sys.n},), got {x_k.shape} and {x_next.shape}")
    return sys.psi(x_next) - sys.psi(x_k) - h * np.asarray(sys.gamma(x_k, u_k))


def zeta_continuous(x, x_dot, u, sys: RegularSystem) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return sys.jacobian(x) @ np.asarray(x_dot, dtype=float) - np.asarray(sys.gamma(x, u))


def central_difference(x_prev, x_next, h: float) -> np.ndarray:
    """(x(t+h) - x(t-h)) / 2h, the fallback state-derivative estimate."""
    return (np.asarray(x_next, dtype=float) - np.asarray(x_prev, dtype=float)) / (2.0 * h)


def stack_bounds(cfg: ObserverConfig, p: Optional[int] = None):
    """Constant diagonal bounds (S_L, S_U) the stack has to stay between."""
    p = cfg.p if p is None else p
    radicand = 0.25 - cfg.h * cfg.omega
    if radicand < 0:
        raise InfeasibleBoundsError(
            f"h*omega = {cfg.h * cfg.omega:g} > 1/4; reduce h or omega"
        )
    root = math.sqrt(radicand)
    lam = np.broadcast_to(cfg.lam.lam, (p,))
    e = np.exp(cfg.h * lam)
    scale = 1.0 / (cfg.h * cfg.kappa)
    S_L = np.diag(scale * (e - (0.5 + root)))
    S_U = np.diag(scale * (e - (0.5 - root)))
    return S_L, S_U


def _guard(d_hat: np.ndarray, step) -> np.ndarray:
    if not np.all(np.isfinite(d_hat)) or np.linalg.norm(d_hat) > DIVERGENCE_NORM:
        raise DivergenceError(step)
    return d_hat


def discrete_step(state: ObserverState, cfg: ObserverConfig) -> np.ndarray:
    st = state.stack
    e = np.exp(cfg.h * cfg.lam.lam)
    d_hat = e * state.d_hat - cfg.kappa * cfg.h * (st._S @ state.d_hat) + cfg.kappa * st._X
    state.d_hat = _guard(d_hat, state.step)
    state.step += 1
    return state.d_hat


def conventional_step(state: ObserverState, cfg: ObserverConfig) -> np.ndarray:
    if state.stack.max_age != 1:
        raise ValueError("conventional observer requires a depth-1 stack (max_age=1)")
    return discrete_step(state, cfg)


def continuous_rhs(d_hat, S, X, cfg: ObserverConfig) -> np.ndarray:
    return cfg.lam.lam * d_hat - cfg.kappa * (S @ d_hat) + cfg.kappa * X


def continuous_step(state: ObserverState, cfg: ObserverConfig, dt: Optional[float] = None,
                    integrator: Literal["euler", "rk4"] = "euler") -> np.ndarray:
    dt = cfg.h if dt is None else dt
    if dt > cfg.h * (1 + 1e-12):
        raise ValueError(f"substep dt={dt} exceeds the sampling period h={cfg.h}")
    S, X = state.stack._S, state.stack._X
    y = state.d_hat
    if integrator == "euler":
        y = y + dt * continuous_rhs(y, S, X, cfg)
    elif integrator == "rk4":
        k1 = continuous_rhs(y, S, X, cfg)
        k2 = continuous_rhs(y + 0.5 * dt * k1, S, X, cfg)
        k3 = continuous_rhs(y + 0.5 * dt * k2, S, X, cfg)
        k4 = continuous_rhs(y + dt * k3, S, X, cfg)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    else:
        raise ValueError(f"unknown integrator {integrator!r}")
    state.d_hat = _guard(y, state.step)
    state.step += 1
    return state.d_hat


def theorem1_condition(S, cfg: ObserverConfig) -> bool:
    """Continuous-time convergence condition S > (omega I + Lambda) / kappa."""
    return loewner_gt(S, continuous_lower_bound(cfg), 0.0)


def continuous_lower_bound(cfg: ObserverConfig) -> np.ndarray:
    return np.diag((cfg.omega + cfg.lam.lam) / cfg.kappa)
