"""Pydantic request/response schemas for the HTTP service.

The scenario schema mirrors :class:`haps_isac.scenario.ScenarioConfig`
field for field (a test pins the defaults together); solver settings are
expressed as a preset name plus optional overrides.
"""

from __future__ import annotations

import dataclasses
from typing import Literal

from pydantic import BaseModel, ConfigDict

from ..opt import GA_PRESETS, GaConfig
from ..scenario import ScenarioConfig


class ArrayModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rows: int = 4
    cols: int = 4
    spacing_over_lambda: float = 0.5


class EchoParamsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rcs: float | list[float] | None = 1.0
    reflection_amp: float | list[float] | None = None


class ScenarioModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    arena: float = 1000.0
    M: int = 1
    K: int = 4
    J: int = 4
    uav_altitude: float = 40.0
    haps_altitude: float = 20000.0
    haps_xy: list[float] | None = None
    beta0: float = -30.0
    P_max: float = 37.0
    noise_power: float = -110.0
    gamma_th: float = 1e-5
    sinr_th: float | None = 0.0
    upsilon: float = 0.5
    carrier_freq: float = 120e9
    uav_array: ArrayModel = ArrayModel()
    haps_array: ArrayModel = ArrayModel(rows=20, cols=20)
    echo: EchoParamsModel = EchoParamsModel()
    placement_seed: int = 1
    cu_positions: list | None = None
    target_positions: list | None = None

    def to_config(self) -> ScenarioConfig:
        return ScenarioConfig.from_dict(self.model_dump())


class GaModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preset: Literal["desk", "paper"] = "desk"
    population: int | None = None
    generations: int | None = None
    crossover_fraction: float | None = None
    elite_count: int | None = None
    mutation_scale: float | None = None
    function_tolerance: float | None = None
    stall_generations: int | None = None
    penalty_weight: float | None = None
    seed: int | None = None

    def to_config(self) -> GaConfig:
        base = GA_PRESETS[self.preset]
        overrides = {
            name: value
            for name, value in self.model_dump(exclude={"preset"}).items()
            if value is not None
        }
        return dataclasses.replace(base, **overrides)


class GenerateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel = ScenarioModel()


class SolveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel = ScenarioModel()
    ga: GaModel = GaModel()
    mu: float = 0.5
    mode: Literal["sensing", "comm", "multi", "baseline"] = "multi"
    n_seeds: int = 1


class ParetoRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel = ScenarioModel()
    ga: GaModel = GaModel()
    mu_list: list[float] | None = None
    n_seeds: int = 3


class PmaxSweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel = ScenarioModel()
    ga: GaModel = GaModel()
    pmax_list_dbm: list[float] | None = None
    n_seeds: int = 1
    interference: Literal["coherent", "power"] = "coherent"


class GammaSweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel = ScenarioModel()
    ga: GaModel = GaModel()
    gamma_list: list[float] | None = None
    n_seeds: int = 1


class KSweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel = ScenarioModel()
    ga: GaModel = GaModel()
    k_list: list[int] | None = None
    proposed_mu: float = 0.0
    n_seeds: int = 1
    interference: Literal["coherent", "power"] = "coherent"


class TrajectoryRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel = ScenarioModel()
    ga: GaModel = GaModel()
    n_slots: int = 4
    slot_duration: float = 1.0
    v_max: float = 30.0
    mu: float = 0.5
    mode: Literal["sensing", "comm", "multi", "baseline"] = "multi"


class ValidateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel = ScenarioModel()


class RerunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config_echo: dict


class ExperimentResponse(BaseModel):
    kind: str
    columns: list[str]
    rows: list[dict]
    config_echo: dict
    seeds: list[int]
    wall_time: float
    csv: str


class ScenarioResponse(BaseModel):
    scenario: dict


class HealthResponse(BaseModel):
    status: str
    service: str
    version: str
