"""Experiment configuration: dataclasses plus a strict TOML loader.

Config files are TOML with flat top-level keys and three optional tables,
``[graph]``, ``[disturbance]`` and ``[control_options]``. Unknown keys are
rejected.
"""
from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

Number = Union[int, float]
Vector = Union[Number, list]

DEFAULT_SEED = 3


class ConfigError(ValueError):
    pass


@dataclass
class GraphConfig:
    generator: str = "erdos_renyi"
    density: float = 0.5
    weight_range: tuple = (0.5, 1.5)
    spectral_radius: Optional[float] = 3.0  # None keeps the raw weights
    file: Optional[str] = None


@dataclass
class DisturbanceConfig:
    """Per-node sinusoids ``offset + amplitude * sin(2 pi frequency t + phase)``.

    Each of the four arrays may be given explicitly (scalar or per-node list);
    anything left as None is generated from the seed with the remaining knobs.
    """

    amplitude: Optional[Vector] = None
    frequency: Optional[Vector] = None
    phase: Optional[Vector] = None
    offset: Optional[Vector] = None
    offset_range: tuple = (0.5, 1.5)
    amplitude_fraction: float = 0.9
    frequency_range: tuple = (0.1, 0.5)
    # generated phases put every sinusoid's trough near this time
    trough_time: float = 1.5
    phase_jitter: float = 0.3


@dataclass
class ControlOptions:
    epsilon: float = 1e-3
    delta_max: Optional[float] = None


@dataclass
class ExperimentConfig:
    n: int = 10
    h: float = 1e-3
    T: float = 5.0
    kappa: float = 100.0
    omega: float = 5.0
    lam: Vector = -1.0
    delta_baseline: Vector = 2.25
    seed: int = DEFAULT_SEED
    mode: str = "cl"                  # cl | conventional | both
    control: str = "off"              # off | compensate
    observer_time: str = "discrete"   # discrete | continuous
    output_dir: str = "runs/default"
    x0: Optional[list] = None         # None -> U(0,1) from the seed
    max_age: Optional[int] = None     # None -> five slowest time constants
    pe_window: float = 1.0
    graph: GraphConfig = field(default_factory=GraphConfig)
    disturbance: DisturbanceConfig = field(default_factory=DisturbanceConfig)
    control_options: ControlOptions = field(default_factory=ControlOptions)

    @property
    def steps(self) -> int:
        return int(round(self.T / self.h))

    def validate(self) -> "ExperimentConfig":
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if not self.h > 0 or not self.T >= 0:
            raise ConfigError("need h > 0 and T >= 0")
        if abs(self.steps * self.h - self.T) > 1e-9 * max(1.0, self.T):
            raise ConfigError(f"T/h = {self.T / self.h} is not an integer step count")
        if not (self.kappa > 0 and self.omega > 0):
            raise ConfigError("kappa and omega must be positive")
        if self.mode not in ("cl", "conventional", "both"):
            raise ConfigError(f"mode must be cl, conventional or both, got {self.mode!r}")
        if self.control not in ("off", "compensate"):
            raise ConfigError(f"control must be off or compensate, got {self.control!r}")
        if self.observer_time not in ("discrete", "continuous"):
            raise ConfigError(f"observer_time must be discrete or continuous, got {self.observer_time!r}")
        if self.h * self.omega > 0.25:
            raise ConfigError(
                f"h*omega = {self.h * self.omega:g} > 1/4: stack bounds are infeasible"
            )
        if self.graph.generator not in ("erdos_renyi", "file"):
            raise ConfigError(f"unknown graph generator {self.graph.generator!r}")
        if self.graph.generator == "file" and not self.graph.file:
            raise ConfigError("graph.generator = 'file' needs graph.file")
        if not 0 < self.graph.density <= 1:
            raise ConfigError("graph.density must lie in (0, 1]")
        lo, hi = self.graph.weight_range
        if not 0 < lo <= hi:
            raise ConfigError("graph.weight_range must satisfy 0 < lo <= hi")
        dist = self.disturbance
        if dist.amplitude_fraction > 1 or dist.amplitude_fraction < 0:
            raise ConfigError("disturbance.amplitude_fraction must lie in [0, 1] (rates stay >= 0)")
        if self.pe_window <= 0:
            raise ConfigError("pe_window must be positive")
        return self


def paper_scale(cfg: ExperimentConfig) -> ExperimentConfig:
    """The full-size scenario: 67 nodes at h = 1e-4 over T = 5.

    The sparser graph keeps a similar number of edges per node; spectral
    normalization keeps the infection pressure at the desk-scale level.
    """
    return dataclasses.replace(
        cfg, n=67, h=1e-4, T=5.0,
        graph=dataclasses.replace(cfg.graph, generator="erdos_renyi", density=0.1, file=None),
    )


_TABLES = {
    "graph": GraphConfig,
    "disturbance": DisturbanceConfig,
    "control_options": ControlOptions,
}
_KEY_ALIASES = {"lambda": "lam"}


def _build(cls, data: dict, where: str):
    known = {f.name for f in fields(cls)}
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        name = _KEY_ALIASES.get(key, key)
        if name not in known or name in _TABLES and cls is not ExperimentConfig:
            raise ConfigError(f"unknown key {where}{key!r}")
        if name in _TABLES:
            if not isinstance(value, dict):
                raise ConfigError(f"{key!r} must be a table")
            value = _build(_TABLES[name], value, f"{key}.")
        elif isinstance(value, list) and name.endswith("_range"):
            if len(value) != 2:
                raise ConfigError(f"{where}{key} must have two entries")
            value = tuple(float(v) for v in value)
        kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    return _build(ExperimentConfig, data, "").validate()


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Plain dict of the resolved config, with TOML key names."""
    out = dataclasses.asdict(cfg)
    out["lambda"] = out.pop("lam")
    for table in _TABLES:
        for k, v in list(out[table].items()):
            if isinstance(v, tuple):
                out[table][k] = list(v)
    return out
