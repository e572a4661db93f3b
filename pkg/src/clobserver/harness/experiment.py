"""Closed simulation loop: SIS plant, observer, sample selection and controller.

Per step k (records are taken before stepping):

    delta(k)  = baseline, or the compensation law fed with d_hat(k)
    x(k+1)    = SIS plant driven by the true d(k)
    d_hat(k+1) from the stacks at instant k          (discrete observer)
    sample (L(x(k)), zeta_k) pushed, selection run    -> stacks at instant k+1

The continuous-time observer pushes the sample of instant k before
integrating over [k, k+1], since it needs x'(k) rather than x(k+1).
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..control import ControlConfig, compensate
from ..diagnostics import ConditionStatus, RunningPE, accumulated_error_discrete, ResidualHistory
from ..numerics import DiagonalGain, min_eigenvalue
from ..observers import (
    DivergenceError, ObserverConfig, continuous_lower_bound, continuous_step,
    conventional_step, discrete_step, new_observer, stack_bounds, zeta_continuous, zeta_discrete,
)
from ..systems import sis_gain, sis_regular, sis_update, sis_vector_field
from .config import ExperimentConfig
from .scenario import Scenario, build_scenario

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrajectoryRecord:
    k: int
    t: float
    x: np.ndarray
    d: np.ndarray
    d_hat: np.ndarray
    err_norm: float
    depth: int
    status: ConditionStatus
    pe_metric: float
    clamp_count: int


@dataclass
class Trajectory:
    """Columnar per-step log; indexing yields :class:`TrajectoryRecord`."""

    mode: str
    h: float
    x: np.ndarray
    d: np.ndarray
    d_hat: np.ndarray
    depth: np.ndarray
    margin_lower: np.ndarray
    margin_upper: np.ndarray
    pe_metric: np.ndarray
    clamp_count: np.ndarray
    xi_norm: np.ndarray
    diverged: bool = False
    divergence_step: Optional[int] = None

    @classmethod
    def allocate(cls, mode: str, h: float, steps: int, n: int) -> "Trajectory":
        return cls(
            mode=mode, h=h,
            x=np.zeros((steps, n)), d=np.zeros((steps, n)), d_hat=np.zeros((steps, n)),
            depth=np.zeros(steps, dtype=int),
            margin_lower=np.zeros(steps), margin_upper=np.zeros(steps),
            pe_metric=np.zeros(steps), clamp_count=np.zeros(steps, dtype=int),
            xi_norm=np.full(steps, np.nan),
        )

    def truncate(self, steps: int) -> None:
        for f in ("x", "d", "d_hat", "depth", "margin_lower", "margin_upper",
                  "pe_metric", "clamp_count", "xi_norm"):
            setattr(self, f, getattr(self, f)[:steps])

    def __len__(self) -> int:
        return self.x.shape[0]

    @property
    def k(self) -> np.ndarray:
        return np.arange(len(self))

    @property
    def t(self) -> np.ndarray:
        return self.k * self.h

    @property
    def err_norm(self) -> np.ndarray:
        return np.linalg.norm(self.d - self.d_hat, axis=1)

    @property
    def lower_ok(self) -> np.ndarray:
        return self.margin_lower > 0

    @property
    def upper_ok(self) -> np.ndarray:
        return self.margin_upper > 0

    def __getitem__(self, k: int) -> TrajectoryRecord:
        if k < 0:
            k += len(self)
        status = ConditionStatus(bool(self.margin_lower[k] > 0), bool(self.margin_upper[k] > 0),
                                 float(self.margin_lower[k]), float(self.margin_upper[k]))
        return TrajectoryRecord(
            k=k, t=k * self.h, x=self.x[k], d=self.d[k], d_hat=self.d_hat[k],
            err_norm=float(np.linalg.norm(self.d[k] - self.d_hat[k])), depth=int(self.depth[k]),
            status=status, pe_metric=float(self.pe_metric[k]), clamp_count=int(self.clamp_count[k]),
        )

    def __iter__(self):
        return (self[k] for k in range(len(self)))


def observer_config(cfg: ExperimentConfig, mode: str) -> ObserverConfig:
    lam = np.broadcast_to(np.asarray(cfg.lam, dtype=float), (cfg.n,)).copy()
    return ObserverConfig(kappa=cfg.kappa, lam=DiagonalGain(lam), h=cfg.h,
                          omega=cfg.omega, mode=mode)


def selection_bounds(ocfg: ObserverConfig, observer_time: str):
    S_L, S_U = stack_bounds(ocfg)
    if observer_time == "continuous":
        S_L = continuous_lower_bound(ocfg)
    return S_L, S_U


def run_experiment(cfg: ExperimentConfig, mode: Optional[str] = None,
                   scenario: Optional[Scenario] = None, track_xi: bool = False) -> Trajectory:
    """Simulate one observer mode; ``cfg.mode == 'both'`` needs an explicit ``mode``.

    On observer divergence the trajectory is truncated at the failing step
    and tagged rather than raising.
    """
    mode = cfg.mode if mode is None else mode
    if mode not in ("cl", "conventional"):
        raise ValueError("run_experiment needs mode 'cl' or 'conventional'; use run_comparison for both")
    cfg.validate()
    scenario = build_scenario(cfg) if scenario is None else scenario
    model, profile = scenario.model, scenario.profile
    W, h, n = model.W, cfg.h, cfg.n
    system = sis_regular(model)
    ocfg = observer_config(cfg, mode)
    S_L, S_U = selection_bounds(ocfg, cfg.observer_time)
    state = new_observer(ocfg, max_age=cfg.max_age)
    stack = state.stack
    ctrl = ControlConfig(model.curing_baseline, cfg.control_options.epsilon,
                         cfg.control_options.delta_max)
    pe = RunningPE(n, h, int(round(cfg.pe_window / h)))
    continuous = cfg.observer_time == "continuous"

    steps = cfg.steps
    traj = Trajectory.allocate(mode, h, steps, n)
    if track_xi:
        d_all = np.array([profile(k * h) for k in range(steps + 1)])
        residuals = ResidualHistory.from_disturbance(d_all, ocfg.lam, h)

    x = scenario.x0.copy()
    for k in range(steps):
        d_k = profile(k * h)
        L_k = sis_gain(x, W)
        traj.x[k] = x
        traj.d[k] = d_k
        traj.d_hat[k] = state.d_hat
        traj.depth[k] = stack.depth
        S = stack._S
        traj.margin_lower[k] = min_eigenvalue(S - S_L)
        traj.margin_upper[k] = min_eigenvalue(S_U - S)
        traj.pe_metric[k] = pe.push(L_k @ d_k)
        if track_xi:
            traj.xi_norm[k] = np.linalg.norm(accumulated_error_discrete(stack, residuals))

        delta = (compensate(x, state.d_hat, W, ctrl) if cfg.control == "compensate"
                 else model.curing_baseline)
        x_next, clamped = sis_update(x, delta, d_k, model)
        traj.clamp_count[k] = clamped

        try:
            if continuous:
                x_dot = sis_vector_field(x, delta, d_k, W)
                stack.advance_and_add(L_k, zeta_continuous(x, x_dot, delta, system))
                if mode == "cl":
                    stack.select_samples(S_L, S_U)
                continuous_step(state, ocfg)
            else:
                if mode == "cl":
                    discrete_step(state, ocfg)
                else:
                    conventional_step(state, ocfg)
                stack.advance_and_add(L_k, zeta_discrete(x, x_next, delta, system, h))
                if mode == "cl":
                    stack.select_samples(S_L, S_U)
        except DivergenceError:
            log.warning("%s observer diverged at step %d", mode, k)
            traj.truncate(k + 1)
            traj.diverged = True
            traj.divergence_step = k
            return traj
        x = x_next
    return traj


def run_comparison(cfg: ExperimentConfig, track_xi: bool = False) -> dict[str, Trajectory]:
    scenario = build_scenario(cfg)
    return {mode: run_experiment(cfg, mode, scenario, track_xi=track_xi)
            for mode in ("cl", "conventional")}


def run_configured(cfg: ExperimentConfig) -> dict[str, Trajectory]:
    """Run whatever ``cfg.mode`` asks for, keyed by observer mode."""
    if cfg.mode == "both":
        return run_comparison(cfg)
    return {cfg.mode: run_experiment(cfg)}
