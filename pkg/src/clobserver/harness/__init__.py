"""Experiment harness: configs, scenarios, simulation loop, metrics, outputs, CLI."""
from .config import ConfigError, ExperimentConfig, load_config, paper_scale
from .experiment import Trajectory, TrajectoryRecord, run_comparison, run_experiment
from .metrics import compare_report, summarize
from .outputs import read_trajectory_csv, write_outputs
from .scenario import DisturbanceProfile, build_scenario, disturbance_at, generate_network

__all__ = [
    "ConfigError", "ExperimentConfig", "load_config", "paper_scale",
    "Trajectory", "TrajectoryRecord", "run_comparison", "run_experiment",
    "compare_report", "summarize", "read_trajectory_csv", "write_outputs",
    "DisturbanceProfile", "build_scenario", "disturbance_at", "generate_network",
]
