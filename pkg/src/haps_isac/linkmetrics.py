"""Link-level metrics: LoS channels, per-user SINR and rate, sensing
beampattern gain, expected echo power, and the HAPS-combined echo power.

The closed-form functions take expectations over the unit-variance,
uncorrelated symbol streams; the ``monte_carlo_*`` functions draw actual
symbols and noise and act as independent estimators of the same
quantities.

Interference convention
-----------------------
``sinr`` supports two interference models.  The default ``"coherent"``
form places the sum over interfering beams inside a single modulus,
``|sum_i h^H w_i + sum_j h^H r_j|^2``.  The ``"power"`` form sums the
individual powers, which is what an average over independent symbol
streams produces.  The two differ by cross terms; both are exposed so the
discrepancy can be measured instead of silently reconciled, and the
coherent form is the one used for optimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import (
    ArrayGeometry,
    Position3,
    aod_from_positions,
    distance,
    haps_pathloss_amplitude,
    haps_phase_vectors,
    steering_vector,
)

VIOLATION_TOLERANCE = 1e-6
"""A design counts as feasible when every scaled constraint violation is
at most this large."""


@dataclass(frozen=True)
class ChannelVector:
    """LoS channel between a UPA and a single-antenna ground node."""

    entries: np.ndarray
    beta0: float
    distance: float


@dataclass(frozen=True)
class BeamformerSet:
    """Per-user communication beams ``comm[k]`` and per-target sensing
    beams ``sense[j]``, each a length-G complex vector."""

    comm: np.ndarray
    sense: np.ndarray

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.comm) ** 2) + np.sum(np.abs(self.sense) ** 2))


@dataclass(frozen=True)
class EchoModel:
    """Target reflection model.

    ``reflection_amp`` gives the per-target echo amplitudes directly.
    When it is ``None`` the amplitudes are derived from the radar cross
    sections as ``sqrt(beta0 * rcs) / d^2`` (two-way amplitude), which
    requires the UAV-target distances at evaluation time.
    """

    reflection_amp: np.ndarray | None = None
    rcs: np.ndarray | None = None

    def __post_init__(self):
        if self.reflection_amp is None and self.rcs is None:
            raise ValueError("echo model needs reflection_amp or rcs")
        if self.reflection_amp is not None and np.any(np.asarray(self.reflection_amp) < 0):
            raise ValueError("reflection amplitudes must be nonnegative")

    def amplitudes(self, beta0: float, distances: np.ndarray) -> np.ndarray:
        """Per-target echo amplitudes, deriving from RCS when needed."""
        if self.reflection_amp is not None:
            return np.asarray(self.reflection_amp, dtype=float)
        return np.sqrt(beta0 * np.asarray(self.rcs, dtype=float)) / np.asarray(distances, dtype=float) ** 2


@dataclass(frozen=True)
class ObjectiveValues:
    """Objectives and constraint status of one evaluated design."""

    eta: float
    omega: float
    min_rate: float
    violations: list[tuple[str, float]]
    fitness: float

    @property
    def max_violation(self) -> float:
        return max((v for _, v in self.violations), default=0.0)

    @property
    def feasible(self) -> bool:
        return self.max_violation <= VIOLATION_TOLERANCE


def channel_a2g(beta0: float, uav: Position3, cu: Position3, geom: ArrayGeometry) -> ChannelVector:
    """Air-to-ground LoS channel: distance-scaled steering vector with
    amplitude ``sqrt(beta0) / d`` per element."""
    d = distance(uav, cu)
    a = steering_vector(geom, aod_from_positions(uav, cu))
    return ChannelVector(np.sqrt(beta0) / d * a.entries, beta0, d)


def sinr(
    cu_index: int,
    channels: Sequence[ChannelVector],
    bf: BeamformerSet,
    noise_power: float,
    interference: str = "coherent",
) -> float:
    """Linear SINR of one communication user.

    ``channels`` holds one channel per user; only the addressed user's
    channel enters the computation.  See the module docstring for the
    ``interference`` convention.
    """
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    h = channels[cu_index].entries
    comm_gains = bf.comm @ h.conj() if len(bf.comm) else np.zeros(0, dtype=complex)
    sense_gains = bf.sense @ h.conj() if len(bf.sense) else np.zeros(0, dtype=complex)
    signal = abs(comm_gains[cu_index]) ** 2
    others = np.concatenate([np.delete(comm_gains, cu_index), sense_gains])
    if interference == "coherent":
        interf = abs(np.sum(others)) ** 2
    elif interference == "power":
        interf = float(np.sum(np.abs(others) ** 2))
    else:
        raise ValueError(f"unknown interference model {interference!r}")
    return float(signal / (interf + noise_power))


def achievable_rate(sinr_value: float) -> float:
    """Shannon rate ``log2(1 + sinr)`` in bits/s/Hz."""
    if sinr_value < 0:
        raise ValueError(f"SINR must be nonnegative, got {sinr_value}")
    return math.log2(1.0 + sinr_value)


def beampattern_gain(uav: Position3, target: Position3, geom: ArrayGeometry, bf: BeamformerSet) -> float:
    """Transmit power density toward a ground point under the given beams:
    ``a^H (sum_k w_k w_k^H + sum_j r_j r_j^H) a``."""
    a = steering_vector(geom, aod_from_positions(uav, target)).entries
    gain = 0.0
    if len(bf.comm):
        gain += float(np.sum(np.abs(bf.comm @ a.conj()) ** 2))
    if len(bf.sense):
        gain += float(np.sum(np.abs(bf.sense @ a.conj()) ** 2))
    return gain


def expected_echo_power(bf: BeamformerSet, echo: EchoModel, num_elements: int) -> float:
    """Expected squared norm of the echo received back at the UAV,
    ``G^2 sum_j eps_j^2 ||r_j||^2``, over unit-variance sensing symbols."""
    if echo.reflection_amp is None:
        raise ValueError("echo model must carry resolved reflection amplitudes here")
    amps = np.asarray(echo.reflection_amp, dtype=float)
    sense_powers = np.sum(np.abs(bf.sense) ** 2, axis=1) if len(bf.sense) else np.zeros(0)
    return float(num_elements**2 * np.sum(amps**2 * sense_powers))


def _haps_combining_weights(scenario, uav_positions: Sequence[Position3]) -> tuple[np.ndarray, np.ndarray]:
    """Per-UAV pathloss amplitudes ``delta_m`` and combining factors
    ``K_m = (sum_m' c_m')^H c_m`` of the HAPS analog combiner."""
    haps = scenario.haps_position
    c_vectors = []
    deltas = []
    for uav in uav_positions:
        _, c = haps_phase_vectors(scenario.uav_geom, scenario.haps_geom, uav, haps, scenario.carrier_freq)
        c_vectors.append(c.entries)
        deltas.append(haps_pathloss_amplitude(distance(uav, haps), scenario.carrier_freq))
    c_mat = np.stack(c_vectors)
    total = c_mat.sum(axis=0)
    k_factors = c_mat @ total.conj()
    return np.asarray(deltas), k_factors


def omega(scenario, bfs_per_uav: Sequence[BeamformerSet], uav_positions: Sequence[Position3]) -> float:
    """Expected power of the combined echo signal at the HAPS.

    Each UAV's echo is relayed over a LoS backhaul with amplitude
    ``delta_m``, phase-aligned at both ends, and combined over all HAPS
    elements; cross terms between UAVs are kept exactly as the combiner
    produces them.  Receiver noise is excluded: this is the echo-signal
    power itself.  ``scenario`` must expose ``uav_geom``, ``haps_geom``,
    ``haps_position``, ``carrier_freq``, ``beta0``, ``echo`` and
    ``target_positions`` (one list per UAV).
    """
    if len(bfs_per_uav) < 1:
        raise ValueError("need at least one UAV")
    deltas, k_factors = _haps_combining_weights(scenario, uav_positions)
    g = scenario.uav_geom.size
    total = 0.0
    for m, (bf, uav) in enumerate(zip(bfs_per_uav, uav_positions)):
        dists = np.array([distance(uav, t) for t in scenario.target_positions[m]])
        echo = scenario.echo.amplitudes(scenario.beta0, dists)
        echo_power = expected_echo_power(bf, EchoModel(reflection_amp=echo), g)
        total += (g * deltas[m] * abs(k_factors[m])) ** 2 * echo_power
    return float(total)


@dataclass(frozen=True)
class SinrEstimate:
    """Monte-Carlo SINR estimate with a batch-based standard error."""

    estimate: float
    stderr: float
    num_symbols: int


def _draw_circular(rng: np.random.Generator, shape, power: float = 1.0) -> np.ndarray:
    scale = math.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _sinr_from_symbols(symbols: np.ndarray, received: np.ndarray, cu_index: int, interference: str) -> float:
    """SINR estimate from one block of symbols via least-squares gain
    estimation against the known streams."""
    gains, *_ = np.linalg.lstsq(symbols, received, rcond=None)
    signal = abs(gains[cu_index]) ** 2
    if interference == "coherent":
        interf = abs(np.sum(gains) - gains[cu_index]) ** 2
        noise = np.mean(np.abs(received - symbols @ gains) ** 2)
        return float(signal / (interf + noise))
    # Physical measurement: power left after removing the user's own
    # stream is interference plus noise.
    residual = received - gains[cu_index] * symbols[:, cu_index]
    return float(signal / np.mean(np.abs(residual) ** 2))


def monte_carlo_sinr(
    cu_index: int,
    channels: Sequence[ChannelVector],
    bf: BeamformerSet,
    noise_power: float,
    num_symbols: int,
    seed: int,
    interference: str = "coherent",
) -> SinrEstimate:
    """Symbol-level SINR estimate for one user.

    Draws unit-variance circular symbols for every stream plus receiver
    noise, forms the received scalar signal, and estimates each
    stream-to-user gain by least squares against the known symbols.  The
    estimator is consistent for ``sinr`` under the same ``interference``
    convention.  The standard error comes from splitting the symbols into
    up to 20 equal batches.
    """
    if num_symbols < 1:
        raise ValueError("need at least one symbol")
    if interference not in ("coherent", "power"):
        raise ValueError(f"unknown interference model {interference!r}")
    h = channels[cu_index].entries
    gains = np.concatenate(
        [
            bf.comm @ h.conj() if len(bf.comm) else np.zeros(0, dtype=complex),
            bf.sense @ h.conj() if len(bf.sense) else np.zeros(0, dtype=complex),
        ]
    )
    rng = np.random.default_rng(seed)
    symbols = _draw_circular(rng, (num_symbols, len(gains)))
    received = symbols @ gains + _draw_circular(rng, num_symbols, noise_power)

    estimate = _sinr_from_symbols(symbols, received, cu_index, interference)
    n_batches = min(20, num_symbols)
    if n_batches >= 2:
        bounds = np.linspace(0, num_symbols, n_batches + 1, dtype=int)
        per_batch = [
            _sinr_from_symbols(symbols[lo:hi], received[lo:hi], cu_index, interference)
            for lo, hi in zip(bounds[:-1], bounds[1:])
        ]
        stderr = float(np.std(per_batch, ddof=1) / math.sqrt(n_batches))
    else:
        stderr = float("inf")
    return SinrEstimate(estimate, stderr, num_symbols)


def monte_carlo_omega(
    scenario,
    bfs_per_uav: Sequence[BeamformerSet],
    uav_positions: Sequence[Position3],
    num_symbols: int,
    seed: int,
    haps_noise_power: float = 0.0,
) -> float:
    """Symbol-level estimate of the HAPS-combined echo power.

    Builds the echoes, the per-element HAPS signals and the combined
    signal explicitly for ``num_symbols`` independent draws and averages
    the squared norm.  ``haps_noise_power`` adds receiver noise at each
    HAPS element; the closed form ``omega`` deliberately excludes it.
    """
    rng = np.random.default_rng(seed)
    g = scenario.uav_geom.size
    s = scenario.haps_geom.size
    haps = scenario.haps_position
    echoes = []
    c_vectors = []
    deltas = []
    for m, (bf, uav) in enumerate(zip(bfs_per_uav, uav_positions)):
        dists = np.array([distance(uav, t) for t in scenario.target_positions[m]])
        amps = scenario.echo.amplitudes(scenario.beta0, dists)
        deltas.append(haps_pathloss_amplitude(distance(uav, haps), scenario.carrier_freq))
        _, c = haps_phase_vectors(scenario.uav_geom, scenario.haps_geom, uav, haps, scenario.carrier_freq)
        c_vectors.append(c.entries)
        # Echo at the UAV: each sensing beam scaled by eps_j * a^H a = eps_j * G.
        symbols = _draw_circular(rng, (num_symbols, len(amps)))
        echoes.append((symbols * amps) @ (g * bf.sense))
    # Per-element HAPS signal sums the relayed echoes of every UAV;
    # combining applies the conjugate phase profile of every UAV in turn.
    per_element = np.einsum("m,ms,mng->nsg", g * np.asarray(deltas), np.stack(c_vectors), np.stack(echoes))
    if haps_noise_power > 0:
        per_element = per_element + _draw_circular(rng, (num_symbols, s, 1), haps_noise_power)
    combine = np.stack(c_vectors).sum(axis=0).conj()
    combined = np.einsum("s,nsg->ng", combine, per_element)
    return float(np.mean(np.sum(np.abs(combined) ** 2, axis=1)))
