"""Scenario configuration: the JSON-facing description of the world and
its resolution into linear SI units.

Config files mix dB/dBm fields (matching how link budgets are usually
quoted) with SI fields.  Conversion to linear units happens exactly once,
in :func:`resolve_scenario`; everything downstream works in watts and
meters.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ArrayGeometry, Position3
from .linkmetrics import EchoModel


class ConfigError(ValueError):
    """A scenario or solver configuration failed validation."""


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value) if value > 0 else -math.inf


def dbm_to_watts(value_dbm: float) -> float:
    return 10.0 ** (value_dbm / 10.0) / 1e3


def watts_to_dbm(value_w: float) -> float:
    return 10.0 * math.log10(value_w * 1e3) if value_w > 0 else -math.inf


@dataclass(frozen=True)
class ScenarioConfig:
    """User-facing scenario description.

    Defaults reproduce the reference simulation setup: 4 users and 4
    targets served by one UAV with a 4x4 half-wavelength array at 40 m,
    a 20x20-element HAPS at 20 km, -30 dB channel gain at 1 m, 37 dBm
    transmit power, -110 dBm receiver noise, a 120 GHz backhaul carrier
    and a beampattern-gain threshold of 1e-5.
    """

    arena: float = 1000.0
    M: int = 1
    K: int = 4
    J: int = 4
    uav_altitude: float = 40.0
    haps_altitude: float = 20000.0
    haps_xy: list | None = None
    beta0: float = -30.0            # dB
    P_max: float = 37.0             # dBm
    noise_power: float = -110.0     # dBm
    gamma_th: float = 1e-5          # linear
    sinr_th: float | None = 0.0     # dB; None disables the per-user floor
    upsilon: float = 0.5
    carrier_freq: float = 120e9
    uav_array: dict = field(default_factory=lambda: {"rows": 4, "cols": 4, "spacing_over_lambda": 0.5})
    haps_array: dict = field(default_factory=lambda: {"rows": 20, "cols": 20, "spacing_over_lambda": 0.5})
    echo: dict = field(default_factory=lambda: {"rcs": 1.0, "reflection_amp": None})
    placement_seed: int = 1
    cu_positions: list | None = None
    target_positions: list | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"scenario config must be an object, got {type(data).__name__}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown scenario field(s): {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _as_position_array(raw, count: int, num_uavs: int, arena: float, label: str) -> np.ndarray:
    """Normalize a position list to shape (M, count, 2) and bounds-check it."""
    arr = np.asarray(raw, dtype=float)
    if arr.size == 0:
        arr = np.zeros((num_uavs, 0, 2))
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.shape != (num_uavs, count, 2):
        raise ConfigError(
            f"{label} must hold {count} [x, y] pairs per UAV ({num_uavs} UAV(s)), got shape {arr.shape}"
        )
    if np.any(arr < 0) or np.any(arr > arena):
        raise ConfigError(f"{label} must lie inside the [0, {arena}] arena")
    return arr


def _validate(config: ScenarioConfig) -> None:
    c = config
    if c.arena <= 0:
        raise ConfigError(f"arena side must be positive, got {c.arena}")
    if c.M < 1:
        raise ConfigError(f"need at least one UAV, got M={c.M}")
    if c.K < 0 or c.J < 0:
        raise ConfigError(f"counts must be nonnegative, got K={c.K}, J={c.J}")
    if not 0 < c.uav_altitude < c.haps_altitude:
        raise ConfigError(
            f"altitudes must satisfy 0 < uav_altitude < haps_altitude, got {c.uav_altitude}, {c.haps_altitude}"
        )
    if not 0.0 <= c.upsilon <= 1.0:
        raise ConfigError(f"upsilon must lie in [0, 1], got {c.upsilon}")
    if c.gamma_th < 0:
        raise ConfigError(f"gamma_th must be nonnegative, got {c.gamma_th}")
    if c.carrier_freq <= 0:
        raise ConfigError(f"carrier_freq must be positive, got {c.carrier_freq}")
    if c.haps_xy is not None and len(c.haps_xy) != 2:
        raise ConfigError("haps_xy must be [x, y]")


def generate_scenario(config: ScenarioConfig) -> ScenarioConfig:
    """Fill in concrete node placements.

    Users and targets without explicit positions are drawn uniformly in
    the arena from ``placement_seed``; the HAPS defaults to the arena
    center.  The returned config is fully explicit, so it reproduces the
    same world on every resolve.
    """
    _validate(config)
    rng = np.random.default_rng(config.placement_seed)
    shape_cu = (config.M, config.K, 2)
    shape_tg = (config.M, config.J, 2)
    if config.cu_positions is not None:
        cu = _as_position_array(config.cu_positions, config.K, config.M, config.arena, "cu_positions")
        rng.uniform(0.0, config.arena, shape_cu)  # keep the stream aligned
    else:
        cu = rng.uniform(0.0, config.arena, shape_cu)
    if config.target_positions is not None:
        targets = _as_position_array(config.target_positions, config.J, config.M, config.arena, "target_positions")
    else:
        targets = rng.uniform(0.0, config.arena, shape_tg)
    haps_xy = list(config.haps_xy) if config.haps_xy is not None else [config.arena / 2.0, config.arena / 2.0]
    return dataclasses.replace(
        config,
        haps_xy=[float(haps_xy[0]), float(haps_xy[1])],
        cu_positions=cu.tolist(),
        target_positions=targets.tolist(),
    )


@dataclass(frozen=True)
class Scenario:
    """Fully resolved world in linear SI units."""

    config: ScenarioConfig
    arena: float
    M: int
    K: int
    J: int
    uav_altitude: float
    haps_position: Position3
    beta0: float
    p_max: float
    noise_power: float
    gamma_th: float
    sinr_th: float
    upsilon: float
    carrier_freq: float
    uav_geom: ArrayGeometry
    haps_geom: ArrayGeometry
    echo: EchoModel
    cu_xy: np.ndarray
    target_xy: np.ndarray

    @property
    def q_min(self) -> float:
        return 0.0

    @property
    def q_max(self) -> float:
        return self.arena

    @property
    def cu_positions(self) -> list[list[Position3]]:
        return [[Position3(x, y, 0.0) for x, y in per_uav] for per_uav in self.cu_xy]

    @property
    def target_positions(self) -> list[list[Position3]]:
        return [[Position3(x, y, 0.0) for x, y in per_uav] for per_uav in self.target_xy]

    def uav_position(self, xy) -> Position3:
        return Position3(float(xy[0]), float(xy[1]), self.uav_altitude)


def _echo_model(raw: dict, num_targets: int) -> EchoModel:
    known = {"rcs", "reflection_amp"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown echo field(s): {', '.join(unknown)}")
    amp = raw.get("reflection_amp")
    if amp is not None:
        amp = np.broadcast_to(np.asarray(amp, dtype=float), (num_targets,)).copy()
        return EchoModel(reflection_amp=amp)
    rcs = np.broadcast_to(np.asarray(raw.get("rcs", 1.0), dtype=float), (num_targets,)).copy()
    if np.any(rcs < 0):
        raise ConfigError("rcs values must be nonnegative")
    return EchoModel(rcs=rcs)


def _array_geometry(raw: dict, label: str) -> ArrayGeometry:
    known = {"rows", "cols", "spacing_over_lambda"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown {label} field(s): {', '.join(unknown)}")
    try:
        return ArrayGeometry(
            rows=int(raw.get("rows", 1)),
            cols=int(raw.get("cols", 1)),
            spacing_over_lambda=float(raw.get("spacing_over_lambda", 0.5)),
        )
    except ValueError as exc:
        raise ConfigError(f"{label}: {exc}") from exc


def resolve_scenario(config: ScenarioConfig) -> Scenario:
    """Resolve a config into linear units, generating placements if the
    config does not carry them yet."""
    if config.cu_positions is None or config.target_positions is None or config.haps_xy is None:
        config = generate_scenario(config)
    else:
        _validate(config)
    cu = _as_position_array(config.cu_positions, config.K, config.M, config.arena, "cu_positions")
    targets = _as_position_array(config.target_positions, config.J, config.M, config.arena, "target_positions")
    return Scenario(
        config=config,
        arena=config.arena,
        M=config.M,
        K=config.K,
        J=config.J,
        uav_altitude=config.uav_altitude,
        haps_position=Position3(float(config.haps_xy[0]), float(config.haps_xy[1]), config.haps_altitude),
        beta0=db_to_linear(config.beta0),
        p_max=dbm_to_watts(config.P_max),
        noise_power=dbm_to_watts(config.noise_power),
        gamma_th=config.gamma_th,
        sinr_th=db_to_linear(config.sinr_th) if config.sinr_th is not None else 0.0,
        upsilon=config.upsilon,
        carrier_freq=config.carrier_freq,
        uav_geom=_array_geometry(config.uav_array, "uav_array"),
        haps_geom=_array_geometry(config.haps_array, "haps_array"),
        echo=_echo_model(config.echo, config.J),
        cu_xy=cu,
        target_xy=targets,
    )


def load_config(path: str) -> ScenarioConfig:
    """Load a scenario config from a JSON file with location-aware errors."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return ScenarioConfig.from_dict(data)
