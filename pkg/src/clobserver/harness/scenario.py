"""Seeded generation of networks, disturbance profiles and initial states."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..systems import SISModel, load_adjacency_csv
from .config import DisturbanceConfig, ExperimentConfig


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def generate_network(n: int, density: float, weight_range=(0.5, 1.5), seed=0,
                     spectral_radius: float | None = None) -> np.ndarray:
    """Directed Erdos-Renyi adjacency with uniform edge weights and no self-loops.

    Entry w_ij > 0 is an edge from j to i. A node left without any in- or
    out-edge gets one random edge so that every infection rate acts on the
    plant. With ``spectral_radius`` set, W is rescaled to that radius.
    """
    if n < 2:
        raise ValueError("network needs at least 2 nodes")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    lo, hi = weight_range
    if not 0 < lo <= hi:
        raise ValueError("weights must be positive with lo <= hi")
    rng = _rng(seed)
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    W = np.where(mask, rng.uniform(lo, hi, (n, n)), 0.0)
    for j in range(n):
        if not W[:, j].any():
            i = (j + 1 + rng.integers(n - 1)) % n
            W[i, j] = rng.uniform(lo, hi)
        if not W[j, :].any():
            i = (j + 1 + rng.integers(n - 1)) % n
            W[j, i] = rng.uniform(lo, hi)
    if spectral_radius is not None:
        W *= spectral_radius / np.max(np.abs(np.linalg.eigvals(W)))
    return W


@dataclass(frozen=True)
class DisturbanceProfile:
    amplitude: np.ndarray
    frequency: np.ndarray
    phase: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        if np.any(self.offset < self.amplitude - 1e-15):
            raise ValueError("offsets must be >= amplitudes so rates stay nonnegative")

    @property
    def n(self) -> int:
        return self.offset.size

    def __call__(self, t: float) -> np.ndarray:
        return self.offset + self.amplitude * np.sin(2 * np.pi * self.frequency * t + self.phase)

    def derivative(self, t: float) -> np.ndarray:
        w = 2 * np.pi * self.frequency
        return self.amplitude * w * np.cos(w * t + self.phase)


def disturbance_at(profile: DisturbanceProfile, i: int, t: float) -> float:
    return float(profile.offset[i] + profile.amplitude[i]
                 * np.sin(2 * np.pi * profile.frequency[i] * t + profile.phase[i]))


def _vec(value, n: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        return np.full(n, float(arr[0]))
    if arr.shape != (n,):
        raise ValueError(f"{name} needs 1 or {n} entries, got {arr.size}")
    return arr


def make_profile(dcfg: DisturbanceConfig, n: int, seed=0) -> DisturbanceProfile:
    """Explicit arrays win; the rest is generated.

    Frequencies spread linearly over ``frequency_range``; phases put each
    trough near ``trough_time`` with Gaussian jitter; offsets are uniform over
    ``offset_range`` and amplitudes a fixed fraction of the offsets.
    """
    rng = _rng(seed)
    offset = (_vec(dcfg.offset, n, "offset") if dcfg.offset is not None
              else rng.uniform(*dcfg.offset_range, n))
    amplitude = (_vec(dcfg.amplitude, n, "amplitude") if dcfg.amplitude is not None
                 else dcfg.amplitude_fraction * offset)
    frequency = (_vec(dcfg.frequency, n, "frequency") if dcfg.frequency is not None
                 else np.linspace(*dcfg.frequency_range, n))
    if dcfg.phase is not None:
        phase = _vec(dcfg.phase, n, "phase")
    else:
        phase = (-0.5 * np.pi - 2 * np.pi * frequency * dcfg.trough_time
                 + dcfg.phase_jitter * rng.standard_normal(n))
        phase = np.mod(phase, 2 * np.pi)
    return DisturbanceProfile(amplitude, frequency, phase, offset)


@dataclass(frozen=True)
class Scenario:
    model: SISModel
    profile: DisturbanceProfile
    x0: np.ndarray

    @property
    def W(self) -> np.ndarray:
        return self.model.W


def build_scenario(cfg: ExperimentConfig) -> Scenario:
    """Independent child streams of the seed drive graph, x(0) and profile."""
    graph_ss, x0_ss, dist_ss = np.random.SeedSequence(cfg.seed).spawn(3)
    if cfg.graph.generator == "file":
        W = load_adjacency_csv(cfg.graph.file)
        if W.shape[0] != cfg.n:
            raise ValueError(f"adjacency file has {W.shape[0]} nodes, config says n={cfg.n}")
    else:
        W = generate_network(cfg.n, cfg.graph.density, cfg.graph.weight_range,
                             np.random.default_rng(graph_ss), cfg.graph.spectral_radius)
    x0 = (_vec(cfg.x0, cfg.n, "x0") if cfg.x0 is not None
          else np.random.default_rng(x0_ss).random(cfg.n))
    if np.any((x0 < 0) | (x0 > 1)):
        raise ValueError("x0 must lie in [0, 1]")
    profile = make_profile(cfg.disturbance, cfg.n, np.random.default_rng(dist_ss))
    model = SISModel(W, _vec(cfg.delta_baseline, cfg.n, "delta_baseline"), cfg.h)
    return Scenario(model, profile, x0)
