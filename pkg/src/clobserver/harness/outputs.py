"""Persistence: trajectory CSVs, metrics JSON, resolved config and plot data."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, config_to_dict
from .experiment import Trajectory

FLOAT_FMT = "%.17g"
PLOT_NODE_STRIDE = 7      # nodes 1, 8, 15, ... keeps the plots readable
MAX_PLOT_POINTS = 5000


def trajectory_header(n: int) -> list[str]:
    return (["k", "t"]
            + [f"x_{i}" for i in range(1, n + 1)]
            + [f"d_{i}" for i in range(1, n + 1)]
            + [f"dhat_{i}" for i in range(1, n + 1)]
            + ["err_norm", "depth", "lower_ok", "upper_ok", "pe_metric"])


def trajectory_matrix(traj: Trajectory) -> np.ndarray:
    return np.column_stack([
        traj.k, traj.t, traj.x, traj.d, traj.d_hat, traj.err_norm, traj.depth,
        traj.lower_ok.astype(float), traj.upper_ok.astype(float), traj.pe_metric,
    ]) if len(traj) else np.zeros((0, 3 * traj.x.shape[1] + 7))


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    n = traj.x.shape[1]
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(trajectory_header(n)) + "\n")
            if len(traj):
                np.savetxt(fh, trajectory_matrix(traj), fmt=FLOAT_FMT, delimiter=",")
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc
    return path


def read_trajectory_csv(path) -> dict:
    """Columns of a trajectory CSV keyed by header name, plus stacked x/d/dhat."""
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        data = np.zeros((0, len(header)))
    cols = {name: data[:, i] for i, name in enumerate(header)}
    n = sum(1 for name in header if name.startswith("x_"))
    for prefix in ("x", "d", "dhat"):
        cols[prefix] = np.column_stack([cols[f"{prefix}_{i}"] for i in range(1, n + 1)]) \
            if len(data) else np.zeros((0, n))
    return cols


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            raise ValueError(f"cannot serialize {v} to TOML")
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"unsupported config value {v!r}")


def dump_config_toml(cfg: ExperimentConfig) -> str:
    """Serialize a config so that ``load_config`` reads it back unchanged (None keys are dropped)."""
    data = config_to_dict(cfg)
    lines, tables = [], []
    for key, value in data.items():
        if isinstance(value, dict):
            tables.append((key, value))
        elif value is not None:
            lines.append(f"{key} = {_toml_value(value)}")
    for name, table in tables:
        lines.append(f"\n[{name}]")
        lines.extend(f"{k} = {_toml_value(v)}" for k, v in table.items() if v is not None)
    return "\n".join(lines) + "\n"


def _plot_series(path: Path, t, values) -> None:
    stride = max(1, int(math.ceil(len(t) / MAX_PLOT_POINTS)))
    with open(path, "w", newline="") as fh:
        fh.write("t,value\n")
        if len(t):
            np.savetxt(fh, np.column_stack([t[::stride], values[::stride]]),
                       fmt=FLOAT_FMT, delimiter=",")


def write_plot_data(runs: dict, cfg: ExperimentConfig, out_dir) -> list[Path]:
    """Two-column (t, value) series, one file per plotted quantity."""
    plot_dir = Path(out_dir) / "plots"
    plot_dir.mkdir(parents=True, exist_ok=True)
    written = []
    any_run = next(iter(runs.values()))
    nodes = range(0, cfg.n, PLOT_NODE_STRIDE)
    state_fig = "fig5_controlled_infection_probability" if cfg.control == "compensate" \
        else "fig3_infection_probability"
    for i in nodes:
        p = plot_dir / f"fig2_infection_rate_node{i + 1:02d}.csv"
        _plot_series(p, any_run.t, any_run.d[:, i])
        written.append(p)
    for mode, traj in runs.items():
        suffix = "" if len(runs) == 1 and mode == "cl" else f"_{mode}"
        for i in nodes:
            p = plot_dir / f"{state_fig}{suffix}_node{i + 1:02d}.csv"
            _plot_series(p, traj.t, traj.x[:, i])
            written.append(p)
        panel = "fig4a_estimation_error_cl" if mode == "cl" else "fig4c_estimation_error_conventional"
        for i in nodes:
            p = plot_dir / f"{panel}_node{i + 1:02d}.csv"
            _plot_series(p, traj.t, traj.d[:, i] - traj.d_hat[:, i])
            written.append(p)
        if mode == "cl":
            p = plot_dir / "fig4b_stack_depth.csv"
            _plot_series(p, traj.t, traj.depth.astype(float))
            written.append(p)
    return written


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def write_outputs(runs: dict, report: dict, cfg: ExperimentConfig, out_dir=None) -> list[Path]:
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = [write_trajectory_csv(traj, out / f"trajectory_{mode}.csv")
                   for mode, traj in runs.items()]
        metrics = out / "metrics.json"
        metrics.write_text(json.dumps(_json_safe(report), indent=2, sort_keys=True) + "\n")
        resolved = out / "config_resolved.toml"
        resolved.write_text(dump_config_toml(cfg))
        written += [metrics, resolved]
        written += write_plot_data(runs, cfg, out)
    except OSError as exc:
        raise OSError(f"failed writing outputs under {out}: {exc}") from exc
    return written
