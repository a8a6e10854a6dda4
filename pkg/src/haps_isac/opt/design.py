"""Decision variables, constraint evaluation, and the scalarized fitness.

A design point fixes, per UAV, the horizontal position plus one transmit
power per user beam and per sensing beam; the actual beamformers are the
matched (steering-vector) directions scaled by those powers.  All
evaluation is vectorized over a batch of designs so the GA and the
exhaustive oracle share one code path.

Solve modes
-----------
``sensing``   maximize the HAPS echo power under the sensing power budget
              and the position box.
``comm``      maximize the worst-user SINR under the total power budget,
              the position box, and the beampattern-gain floors.
``baseline``  same feasible set as ``comm``; used for the UAV-only rate
              baseline (no HAPS stage is reported).
``multi``     maximize ``mu * omega_norm + (1 - mu) * eta_norm`` under the
              union of both constraint sets plus the per-user SINR floor.

Constraint violations are reported scaled by each constraint's reference
magnitude (budgets by the budget, gain floors by the required gain), so a
single feasibility tolerance applies across constraints of wildly
different physical units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..geometry import steering_vector, aod_from_positions, wavelength
from ..linkmetrics import VIOLATION_TOLERANCE, BeamformerSet, ObjectiveValues
from ..scenario import Scenario

MODES = ("sensing", "comm", "multi", "baseline")

_FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class DesignPoint:
    """Per-UAV horizontal position and beam power allocation."""

    uav_xy: np.ndarray       # (M, 2) meters
    comm_power: np.ndarray   # (M, K) watts
    sense_power: np.ndarray  # (M, J) watts

    def __post_init__(self):
        object.__setattr__(self, "uav_xy", np.atleast_2d(np.asarray(self.uav_xy, dtype=float)))
        object.__setattr__(self, "comm_power", np.atleast_2d(np.asarray(self.comm_power, dtype=float)))
        object.__setattr__(self, "sense_power", np.atleast_2d(np.asarray(self.sense_power, dtype=float)))


def build_matched_beamformers(design: DesignPoint, scenario: Scenario) -> list[BeamformerSet]:
    """Matched beamformers ``sqrt(p) * a / sqrt(G)`` per UAV.

    Each beam points its full steering vector at its user or target, so
    ``||w_k||^2`` equals the allocated power exactly.
    """
    if np.any(design.comm_power < 0) or np.any(design.sense_power < 0):
        raise ValueError("beam powers must be nonnegative")
    g = scenario.uav_geom.size
    sets = []
    for m in range(scenario.M):
        uav = scenario.uav_position(design.uav_xy[m])
        comm = np.zeros((scenario.K, g), dtype=complex)
        sense = np.zeros((scenario.J, g), dtype=complex)
        for k, cu in enumerate(scenario.cu_positions[m]):
            a = steering_vector(scenario.uav_geom, aod_from_positions(uav, cu)).entries
            comm[k] = math.sqrt(design.comm_power[m, k]) * a / math.sqrt(g)
        for j, tgt in enumerate(scenario.target_positions[m]):
            a = steering_vector(scenario.uav_geom, aod_from_positions(uav, tgt)).entries
            sense[j] = math.sqrt(design.sense_power[m, j]) * a / math.sqrt(g)
        sets.append(BeamformerSet(comm=comm, sense=sense))
    return sets


def objective_scales(scenario: Scenario) -> tuple[float, float]:
    """Order-of-magnitude scales for the two objectives.

    Used as default normalization so the penalty weight is meaningful
    before the self-normalization pass has run.  The SINR scale assumes an
    average-distance user under full-power interference; the echo scale
    assumes the whole sensing budget on a directly-overhead target.
    """
    d2_typical = scenario.uav_altitude**2 + scenario.arena**2 / 6.0
    gain = scenario.beta0 / d2_typical
    g = scenario.uav_geom.size
    if scenario.K > 0:
        signal = scenario.p_max / scenario.K * g * gain
        eta_scale = signal / (gain * scenario.p_max + scenario.noise_power)
    else:
        eta_scale = 1.0
    if scenario.J > 0:
        delta = wavelength(scenario.carrier_freq) / (
            _FOUR_PI * (scenario.haps_position.z - scenario.uav_altitude)
        )
        if scenario.echo.reflection_amp is not None:
            eps2 = float(np.max(np.asarray(scenario.echo.reflection_amp) ** 2))
        else:
            eps2 = float(np.max(scenario.beta0 * np.asarray(scenario.echo.rcs))) / scenario.uav_altitude**4
        budget = max(scenario.upsilon, 0.01) * scenario.p_max
        omega_scale = (g * scenario.haps_geom.size * delta) ** 2 * g**2 * eps2 * budget
    else:
        omega_scale = 1.0
    return (max(eta_scale, 1e-300), max(omega_scale, 1e-300))


@dataclass(frozen=True)
class GenomeLayout:
    """Flat genome layout and the decode/repair map for one solve.

    Per UAV the genes are ``[x, y, p_1..p_K, p'_1..p'_J]`` (the comm block
    is dropped in sensing mode).  Decoding clips to the box, projects the
    position into the reachable disc when a velocity anchor is set, and
    rescales power blocks so the total budget and, where active, the
    sensing budget hold exactly.
    """

    scenario: Scenario
    mode: str
    lower: np.ndarray
    upper: np.ndarray
    include_comm: bool
    prev_xy: np.ndarray | None = None
    velocity_radius: float | None = None

    @property
    def genes_per_uav(self) -> int:
        s = self.scenario
        return 2 + (s.K if self.include_comm else 0) + s.J

    @classmethod
    def build(
        cls,
        scenario: Scenario,
        mode: str,
        fixed_uav_xy: np.ndarray | None = None,
        prev_xy: np.ndarray | None = None,
        velocity_radius: float | None = None,
    ) -> "GenomeLayout":
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
        include_comm = mode != "sensing"
        k = scenario.K if include_comm else 0
        lower_blocks = []
        upper_blocks = []
        sense_cap = scenario.upsilon * scenario.p_max if mode in ("sensing", "multi") else scenario.p_max
        for m in range(scenario.M):
            if fixed_uav_xy is not None:
                q = np.asarray(fixed_uav_xy, dtype=float).reshape(scenario.M, 2)[m]
                pos_lo, pos_hi = q.copy(), q.copy()
            else:
                pos_lo = np.full(2, scenario.q_min)
                pos_hi = np.full(2, scenario.q_max)
                if prev_xy is not None and velocity_radius is not None:
                    anchor = np.asarray(prev_xy, dtype=float).reshape(scenario.M, 2)[m]
                    pos_lo = np.maximum(pos_lo, anchor - velocity_radius)
                    pos_hi = np.minimum(pos_hi, anchor + velocity_radius)
            lower_blocks.append(np.concatenate([pos_lo, np.zeros(k + scenario.J)]))
            upper_blocks.append(
                np.concatenate([pos_hi, np.full(k, scenario.p_max), np.full(scenario.J, sense_cap)])
            )
        return cls(
            scenario=scenario,
            mode=mode,
            lower=np.concatenate(lower_blocks),
            upper=np.concatenate(upper_blocks),
            include_comm=include_comm,
            prev_xy=None if prev_xy is None else np.asarray(prev_xy, dtype=float).reshape(scenario.M, 2),
            velocity_radius=velocity_radius,
        )

    def decode(self, genomes: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Genomes ``(P, n_genes)`` to repaired design arrays
        ``(uav_xy (P, M, 2), comm (P, M, K), sense (P, M, J))``."""
        s = self.scenario
        genomes = np.atleast_2d(np.asarray(genomes, dtype=float))
        p = genomes.shape[0]
        genomes = np.clip(genomes, self.lower, self.upper)
        per = self.genes_per_uav
        blocks = genomes.reshape(p, s.M, per)
        uav_xy = blocks[:, :, :2].copy()
        k = s.K if self.include_comm else 0
        comm = blocks[:, :, 2 : 2 + k].copy() if k else np.zeros((p, s.M, s.K))
        sense = blocks[:, :, 2 + k :].copy()

        if self.prev_xy is not None and self.velocity_radius is not None:
            delta = uav_xy - self.prev_xy[None, :, :]
            dist = np.linalg.norm(delta, axis=2)
            over = dist > self.velocity_radius
            if np.any(over):
                scale = np.where(over, self.velocity_radius / np.where(dist > 0, dist, 1.0), 1.0)
                uav_xy = self.prev_xy[None, :, :] + delta * scale[:, :, None]

        total = comm.sum(axis=2) + sense.sum(axis=2)
        over = total > s.p_max
        if np.any(over):
            scale = np.where(over, s.p_max / np.where(total > 0, total, 1.0), 1.0)
            comm *= scale[:, :, None]
            sense *= scale[:, :, None]
        if self.mode in ("sensing", "multi"):
            cap = s.upsilon * s.p_max
            stot = sense.sum(axis=2)
            over = stot > cap
            if np.any(over):
                scale = np.where(over, cap / np.where(stot > 0, stot, 1.0), 1.0)
                sense *= scale[:, :, None]
        return uav_xy, comm, sense

    def encode(self, design: DesignPoint) -> np.ndarray:
        s = self.scenario
        parts = []
        for m in range(s.M):
            parts.append(design.uav_xy[m])
            if self.include_comm:
                parts.append(design.comm_power[m])
            parts.append(design.sense_power[m])
        return np.concatenate(parts)


def constraint_ids(scenario: Scenario, mode: str, with_velocity: bool = False) -> list[str]:
    """Stable ordering of the active constraints for one mode."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    ids = []
    for m in range(scenario.M):
        tag = f"uav{m}"
        if mode != "sensing":
            ids.append(f"{tag}/power_total")
        if mode in ("sensing", "multi"):
            ids.append(f"{tag}/sense_budget")
        ids.append(f"{tag}/position_box")
        if with_velocity:
            ids.append(f"{tag}/velocity")
        ids.append(f"{tag}/nonneg_power")
        if mode != "sensing":
            for j in range(scenario.J):
                ids.append(f"{tag}/target{j}/beampattern")
        if mode == "multi":
            for k in range(scenario.K):
                ids.append(f"{tag}/cu{k}/sinr_floor")
    return ids


@dataclass
class BatchObjectives:
    """Vectorized evaluation results for a batch of designs."""

    eta: np.ndarray
    omega: np.ndarray
    min_rate: np.ndarray
    fitness: np.ndarray
    violations: np.ndarray
    constraint_ids: list[str] = field(default_factory=list)

    @property
    def max_violation(self) -> np.ndarray:
        return self.violations.max(axis=1) if self.violations.shape[1] else np.zeros(len(self.eta))

    @property
    def feasible(self) -> np.ndarray:
        return self.max_violation <= VIOLATION_TOLERANCE


def _flat_element_indices(geom) -> tuple[np.ndarray, np.ndarray]:
    gx = np.repeat(np.arange(geom.rows), geom.cols)
    gy = np.tile(np.arange(geom.cols), geom.rows)
    return gx, gy


def _steering_batch(geom, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Steering entries for direction cosines of shape (..., D) ->
    complex array (..., D, G)."""
    gx, gy = _flat_element_indices(geom)
    phase = u[..., None] * gx + v[..., None] * gy
    return np.exp(-2j * np.pi * geom.spacing_over_lambda * phase)


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def evaluate_designs(
    scenario: Scenario,
    uav_xy: np.ndarray,
    comm_power: np.ndarray,
    sense_power: np.ndarray,
    *,
    mode: str = "multi",
    mu: float = 0.5,
    norms: tuple[float, float] | None = None,
    penalty_weight: float = 1e3,
    prev_xy: np.ndarray | None = None,
    velocity_radius: float | None = None,
    interference: str = "coherent",
) -> BatchObjectives:
    """Evaluate a batch of designs.

    ``comm_power`` and ``sense_power`` have shape ``(P, M, K)`` and
    ``(P, M, J)``.  ``uav_xy`` has shape ``(Pq, M, 2)`` with ``Pq`` either
    ``P`` or 1; the latter evaluates many power allocations at one shared
    position without recomputing the geometry per row.  ``interference``
    selects the coherent (default) or power-sum interference model; see
    ``linkmetrics.sinr``.
    """
    if interference not in ("coherent", "power"):
        raise ValueError(f"unknown interference model {interference!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    s = scenario
    eta_ref, omega_ref = norms if norms is not None else objective_scales(s)
    if eta_ref <= 0 or omega_ref <= 0:
        raise ValueError("objective normalization constants must be positive")

    uav_xy = np.asarray(uav_xy, dtype=float)
    comm_power = np.asarray(comm_power, dtype=float)
    sense_power = np.asarray(sense_power, dtype=float)
    p = max(comm_power.shape[0], sense_power.shape[0])
    pq = uav_xy.shape[0]
    if pq not in (1, p):
        raise ValueError(f"uav_xy batch size {pq} must be 1 or match the power batch size {p}")
    shared_q = pq == 1 and p > 1

    g = s.uav_geom.size
    sqrt_g = math.sqrt(g)
    lam = wavelength(s.carrier_freq)
    with_velocity = prev_xy is not None and velocity_radius is not None
    ids = constraint_ids(s, mode, with_velocity)

    eta = np.full(p, np.inf)
    viol_cols: list[np.ndarray] = []
    deltas: list[np.ndarray] = []
    echo_powers: list[np.ndarray] = []
    c_vectors: list[np.ndarray] = []

    for m in range(s.M):
        q = uav_xy[:, m, :]                       # (Pq, 2)
        pts = np.vstack([s.cu_xy[m], s.target_xy[m]])  # (K+J, 2)
        dx = pts[:, 0] - q[:, 0:1]
        dy = pts[:, 1] - q[:, 1:2]
        slant2 = dx**2 + dy**2 + s.uav_altitude**2
        slant = np.sqrt(slant2)
        a = _steering_batch(s.uav_geom, dx / slant, dy / slant)  # (Pq, K+J, G)

        cp = comm_power[:, m, :]
        sp = sense_power[:, m, :]
        sqrt_all = np.sqrt(np.concatenate([cp, sp], axis=1))     # (P, K+J)

        k_count = s.K
        if k_count > 0:
            # Cross gains from every beam direction into every user channel.
            inner = np.einsum("pkg,pig->pki", a[:, :k_count].conj(), a)
            x = inner * (np.sqrt(s.beta0) / slant[:, :k_count])[:, :, None] / sqrt_g
            x_diag = x[:, np.arange(k_count), np.arange(k_count)]  # (Pq, K)
            signal = cp * np.abs(x_diag) ** 2
            if interference == "coherent":
                if shared_q:
                    t = sqrt_all @ x[0].swapaxes(0, 1)             # (P, K)
                    own = np.sqrt(cp) * x_diag[0]
                else:
                    t = np.einsum("pki,pi->pk", x, sqrt_all)
                    own = np.sqrt(cp) * x_diag
                interf = np.abs(t - own) ** 2
            else:
                x2 = np.abs(x) ** 2
                powers_all = np.concatenate([cp, sp], axis=1)
                if shared_q:
                    interf = powers_all @ x2[0].swapaxes(0, 1) - signal
                else:
                    interf = np.einsum("pki,pi->pk", x2, powers_all) - signal
                interf = np.maximum(interf, 0.0)
            sinr_all = signal / (interf + s.noise_power)
            eta_m = sinr_all.min(axis=1)
        else:
            sinr_all = np.zeros((p, 0))
            eta_m = np.zeros(p)
        eta = np.minimum(eta, eta_m)

        if s.J > 0:
            inner_t = np.einsum("pjg,pig->pji", a[:, k_count:].conj(), a)
            y2 = np.abs(inner_t) ** 2 / g                          # (Pq, J, K+J)
            powers = np.concatenate([cp, sp], axis=1)
            if shared_q:
                zeta = powers @ y2[0].swapaxes(0, 1)
            else:
                zeta = np.einsum("pji,pi->pj", y2, powers)
            d2_targets = slant2[:, k_count:]
            if s.echo.reflection_amp is not None:
                eps2 = np.broadcast_to(np.asarray(s.echo.reflection_amp) ** 2, d2_targets.shape)
            else:
                eps2 = s.beta0 * np.asarray(s.echo.rcs) / d2_targets**2
            if shared_q:
                echo_power = g**2 * (sp @ eps2[0])
            else:
                echo_power = g**2 * np.einsum("pj,pj->p", sp, eps2)
        else:
            zeta = np.zeros((p, 0))
            d2_targets = np.zeros((pq, 0))
            echo_power = np.zeros(p)

        # Backhaul hop: distance-dependent amplitude; the combiner factors
        # need every UAV's receive-phase vector, so they are applied after
        # the loop (for a single UAV the factor is exactly the element
        # count of the HAPS array).
        hp = s.haps_position
        d_haps = np.sqrt((q[:, 0] - hp.x) ** 2 + (q[:, 1] - hp.y) ** 2 + (s.uav_altitude - hp.z) ** 2)
        deltas.append(lam / (_FOUR_PI * d_haps))
        echo_powers.append(echo_power)
        if s.M > 1:
            u_h = (q[:, 0] - hp.x) / d_haps
            v_h = (q[:, 1] - hp.y) / d_haps
            c_vectors.append(_steering_batch(s.haps_geom, u_h[:, None], v_h[:, None])[:, 0, :].conj())

        # Constraint columns, in the order of constraint_ids().
        total_power = cp.sum(axis=1) + sp.sum(axis=1)
        if mode != "sensing":
            viol_cols.append(_relu(total_power - s.p_max) / s.p_max)
        if mode in ("sensing", "multi"):
            cap = s.upsilon * s.p_max
            ref = cap if cap > 0 else s.p_max
            viol_cols.append(_relu(sp.sum(axis=1) - cap) / ref)
        box_excess = np.maximum(_relu(s.q_min - q), _relu(q - s.q_max)).max(axis=1)
        viol_cols.append(np.broadcast_to(box_excess / s.arena, (p,)).copy() if shared_q else box_excess / s.arena)
        if with_velocity:
            anchor = np.asarray(prev_xy, dtype=float).reshape(s.M, 2)[m]
            step = np.linalg.norm(q - anchor, axis=1)
            ref = velocity_radius if velocity_radius > 0 else s.arena
            vexcess = _relu(step - velocity_radius) / ref
            viol_cols.append(np.broadcast_to(vexcess, (p,)).copy() if shared_q else vexcess)
        neg = np.minimum(cp.min(axis=1, initial=0.0), sp.min(axis=1, initial=0.0))
        viol_cols.append(_relu(-neg) / s.p_max)
        if mode != "sensing":
            required = d2_targets * s.gamma_th                     # (Pq, J)
            for j in range(s.J):
                req_j = required[:, j]
                with np.errstate(divide="ignore", invalid="ignore"):
                    v = np.where(req_j > 0, _relu(req_j - zeta[:, j]) / np.where(req_j > 0, req_j, 1.0), 0.0)
                viol_cols.append(np.broadcast_to(v, (p,)).copy() if (shared_q and v.shape[0] == 1) else v)
        if mode == "multi":
            th = s.sinr_th
            for k in range(s.K):
                if th > 0:
                    viol_cols.append(_relu(th - sinr_all[:, k]) / th)
                else:
                    viol_cols.append(np.zeros(p))

    if s.M == 1:
        omega_total = (g * deltas[0] * s.haps_geom.size) ** 2 * echo_powers[0]
    else:
        c_all = np.stack(c_vectors)            # (M, Pq, S)
        total_c = c_all.sum(axis=0)            # (Pq, S)
        omega_total = np.zeros(p)
        for m in range(s.M):
            k_factor = np.abs(np.einsum("ps,ps->p", total_c.conj(), c_all[m]))
            omega_total = omega_total + (g * deltas[m] * k_factor) ** 2 * echo_powers[m]

    violations = np.column_stack(viol_cols) if viol_cols else np.zeros((p, 0))
    eta = np.where(np.isfinite(eta), eta, 0.0)
    min_rate = np.log2(1.0 + eta)

    if mode == "sensing":
        objective = omega_total / omega_ref
    elif mode in ("comm", "baseline"):
        objective = eta / eta_ref
    else:
        objective = mu * (omega_total / omega_ref) + (1.0 - mu) * (eta / eta_ref)
    fitness_vals = objective - penalty_weight * np.sum(violations**2, axis=1)

    return BatchObjectives(
        eta=eta,
        omega=omega_total,
        min_rate=min_rate,
        fitness=fitness_vals,
        violations=violations,
        constraint_ids=ids,
    )


def _evaluate_single(
    design: DesignPoint,
    scenario: Scenario,
    mode: str,
    mu: float,
    norms: tuple[float, float] | None,
    penalty_weight: float,
    prev_xy: np.ndarray | None,
    velocity_radius: float | None,
    interference: str = "coherent",
) -> BatchObjectives:
    return evaluate_designs(
        scenario,
        design.uav_xy[None, :, :],
        design.comm_power[None, :, :],
        design.sense_power[None, :, :],
        mode=mode,
        mu=mu,
        norms=norms,
        penalty_weight=penalty_weight,
        prev_xy=prev_xy,
        velocity_radius=velocity_radius,
        interference=interference,
    )


def evaluate_constraints(
    design: DesignPoint,
    scenario: Scenario,
    mode: str = "multi",
    prev_xy: np.ndarray | None = None,
    velocity_radius: float | None = None,
    interference: str = "coherent",
) -> list[tuple[str, float]]:
    """Scaled violation magnitude of every constraint active in ``mode``
    (zero when satisfied)."""
    batch = _evaluate_single(design, scenario, mode, 0.0, None, 0.0, prev_xy, velocity_radius, interference)
    return list(zip(batch.constraint_ids, batch.violations[0].tolist()))


def fitness(
    design: DesignPoint,
    scenario: Scenario,
    mu: float = 0.5,
    norms: tuple[float, float] | None = None,
    *,
    mode: str = "multi",
    penalty_weight: float = 1e3,
    prev_xy: np.ndarray | None = None,
    velocity_radius: float | None = None,
    interference: str = "coherent",
) -> ObjectiveValues:
    """Objectives and penalized fitness of a single design.

    The worst-user SINR enters directly as the fairness objective; the
    penalty subtracts ``penalty_weight`` times the sum of squared scaled
    violations from the normalized objective.
    """
    batch = _evaluate_single(design, scenario, mode, mu, norms, penalty_weight, prev_xy, velocity_radius, interference)
    return ObjectiveValues(
        eta=float(batch.eta[0]),
        omega=float(batch.omega[0]),
        min_rate=float(batch.min_rate[0]),
        violations=list(zip(batch.constraint_ids, batch.violations[0].tolist())),
        fitness=float(batch.fitness[0]),
    )
