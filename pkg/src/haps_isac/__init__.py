"""Simulator and optimizer for a HAPS-backhauled UAV joint sensing and
communication network."""

__version__ = "0.1.0"

from .geometry import (
    AngleOfDeparture,
    ArrayGeometry,
    Position3,
    SteeringVector,
    aod_from_positions,
    distance,
    haps_pathloss_amplitude,
    haps_phase_vectors,
    steering_vector,
)
from .linkmetrics import (
    BeamformerSet,
    ChannelVector,
    EchoModel,
    ObjectiveValues,
    SinrEstimate,
    achievable_rate,
    beampattern_gain,
    channel_a2g,
    expected_echo_power,
    monte_carlo_omega,
    monte_carlo_sinr,
    omega,
    sinr,
)
from .scenario import Scenario, ScenarioConfig, ConfigError, generate_scenario, resolve_scenario

__all__ = [
    "__version__",
    "AngleOfDeparture",
    "ArrayGeometry",
    "Position3",
    "SteeringVector",
    "aod_from_positions",
    "distance",
    "haps_pathloss_amplitude",
    "haps_phase_vectors",
    "steering_vector",
    "BeamformerSet",
    "ChannelVector",
    "EchoModel",
    "ObjectiveValues",
    "SinrEstimate",
    "achievable_rate",
    "beampattern_gain",
    "channel_a2g",
    "expected_echo_power",
    "monte_carlo_omega",
    "monte_carlo_sinr",
    "omega",
    "sinr",
    "Scenario",
    "ScenarioConfig",
    "ConfigError",
    "generate_scenario",
    "resolve_scenario",
]
