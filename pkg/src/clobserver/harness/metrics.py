"""Scalar summaries of trajectories for reports and acceptance checks."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .experiment import Trajectory


def rmse(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.sqrt(np.mean(values ** 2))) if values.size else float("nan")


def singular_mask(traj: Trajectory, threshold: float = 0.05) -> np.ndarray:
    """Steps where some node is within ``threshold`` of 0 or 1 (gain near singular)."""
    return np.min(np.minimum(traj.x, 1.0 - traj.x), axis=1) < threshold


def summarize(traj: Trajectory, windows: Optional[Sequence[tuple]] = None,
              singular_threshold: float = 0.05, final_fraction: float = 0.2) -> dict:
    """Per-window RMSE of the error norm plus depth, condition and infection statistics.

    ``windows`` are (t_start, t_end) pairs, half-open; the default is unit-length
    windows over the horizon.
    """
    if len(traj) == 0:
        raise ValueError("cannot summarize an empty trajectory")
    t = traj.t
    err = traj.err_norm
    if windows is None:
        edges = np.arange(0.0, t[-1] + traj.h, 1.0)
        windows = [(float(a), float(a + 1.0)) for a in edges]
    per_window = []
    for a, b in windows:
        m = (t >= a - 1e-12) & (t < b - 1e-12)
        per_window.append({"t_start": a, "t_end": b, "rmse": rmse(err[m]), "steps": int(m.sum())})
    sing = singular_mask(traj, singular_threshold)
    closeness = np.min(np.minimum(traj.x, 1.0 - traj.x), axis=1)
    tail = t >= t[-1] - final_fraction * (t[-1] + traj.h) + 1e-12
    return {
        "mode": traj.mode,
        "steps": len(traj),
        "diverged": traj.diverged,
        "divergence_step": traj.divergence_step,
        "rmse_overall": rmse(err),
        "rmse_windows": per_window,
        "rmse_singular": rmse(err[sing]),
        "singular_fraction": float(sing.mean()),
        "singular_threshold": singular_threshold,
        "depth_max": int(traj.depth.max()),
        "depth_mean": float(traj.depth.mean()),
        "t_depth_max": float(t[int(np.argmax(traj.depth))]),
        "lower_ok_fraction": float(traj.lower_ok.mean()),
        "upper_ok_fraction": float(traj.upper_ok.mean()),
        "t_closest_singular": float(t[int(np.argmin(closeness))]),
        "t_min_infection": float(t[int(np.argmin(traj.x.min(axis=1)))]),
        "mean_infection_final": float(traj.x[tail].mean()),
        "clamp_activations": int(traj.clamp_count.sum()),
    }


def compare_report(runs: dict) -> dict:
    """Joint report for a CL/conventional pair sharing one scenario."""
    report = {mode: summarize(traj) if len(traj) else
              {"mode": mode, "steps": 0, "diverged": traj.diverged, "divergence_step": traj.divergence_step}
              for mode, traj in runs.items()}
    if {"cl", "conventional"} <= runs.keys() and len(runs["cl"]) and len(runs["conventional"]):
        cl, conv = runs["cl"], runs["conventional"]
        # the plant does not depend on the observer when control is off, so
        # either run's state defines the singular window
        n = min(len(cl), len(conv))
        sing = singular_mask(cl)[:n]
        r_cl = rmse(cl.err_norm[:n][sing])
        r_conv = rmse(conv.err_norm[:n][sing])
        report["comparison"] = {
            "rmse_singular_cl": r_cl,
            "rmse_singular_conventional": r_conv,
            "rmse_singular_ratio": r_cl / r_conv if r_conv > 0 else float("nan"),
            "rmse_overall_ratio": rmse(cl.err_norm[:n]) / rmse(conv.err_norm[:n]),
        }
    return report
