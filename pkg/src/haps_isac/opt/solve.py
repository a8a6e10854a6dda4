"""Solvers on top of the GA engine: single solves, objective
normalization, the exhaustive grid oracle, Pareto sweeps, and sequential
trajectory optimization."""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..linkmetrics import VIOLATION_TOLERANCE, ObjectiveValues
from ..runtime import parallel_map
from ..scenario import Scenario
from .design import DesignPoint, GenomeLayout, evaluate_designs, fitness, objective_scales
from .ga import GaConfig, ga_maximize


class InfeasibleScenarioError(RuntimeError):
    """No design satisfying the active constraints was found."""


class OracleSizeError(ValueError):
    """The exhaustive oracle refused an instance as too large."""


@dataclass
class SolveResult:
    design: DesignPoint
    objectives: ObjectiveValues
    feasible: bool
    history: np.ndarray
    generations: int
    mode: str
    mu: float
    seed: int


def ga_solve(
    scenario: Scenario,
    mu: float,
    mode: str,
    config: GaConfig,
    *,
    norms: tuple[float, float] | None = None,
    fixed_uav_xy: np.ndarray | None = None,
    prev_xy: np.ndarray | None = None,
    velocity_radius: float | None = None,
    warm_starts: list[DesignPoint] | None = None,
    interference: str = "coherent",
) -> SolveResult:
    """Run the GA on one problem instance.

    Selection acts on the penalized fitness.  The returned design is the
    best individual that met every constraint within tolerance; if none
    was ever seen, the best penalized individual is returned and flagged
    infeasible.  ``warm_starts`` designs join the initial population.
    Identical inputs give bit-identical results.
    """
    layout = GenomeLayout.build(scenario, mode, fixed_uav_xy, prev_xy, velocity_radius)
    if norms is None:
        norms = objective_scales(scenario)
    tracker = {"fitness": -np.inf, "genome": None}

    def evaluate(genomes: np.ndarray) -> np.ndarray:
        xy, cp, sp = layout.decode(genomes)
        batch = evaluate_designs(
            scenario,
            xy,
            cp,
            sp,
            mode=mode,
            mu=mu,
            norms=norms,
            penalty_weight=config.penalty_weight,
            prev_xy=prev_xy,
            velocity_radius=velocity_radius,
            interference=interference,
        )
        feasible = batch.max_violation <= VIOLATION_TOLERANCE
        if np.any(feasible):
            fit = np.where(feasible, batch.fitness, -np.inf)
            idx = int(np.argmax(fit))
            if fit[idx] > tracker["fitness"]:
                tracker["fitness"] = float(fit[idx])
                tracker["genome"] = genomes[idx].copy()
        return batch.fitness

    initial = np.vstack([layout.encode(d) for d in warm_starts]) if warm_starts else None
    result = ga_maximize(evaluate, layout.lower, layout.upper, config, initial_genomes=initial)
    genome = tracker["genome"] if tracker["genome"] is not None else result.best_genome
    xy, cp, sp = layout.decode(genome[None, :])
    design = DesignPoint(uav_xy=xy[0], comm_power=cp[0], sense_power=sp[0])
    objectives = fitness(
        design,
        scenario,
        mu,
        norms,
        mode=mode,
        penalty_weight=config.penalty_weight,
        prev_xy=prev_xy,
        velocity_radius=velocity_radius,
        interference=interference,
    )
    return SolveResult(
        design=design,
        objectives=objectives,
        feasible=objectives.feasible,
        history=result.history,
        generations=result.generations_run,
        mode=mode,
        mu=mu,
        seed=config.seed,
    )


def _best_result(results: list[SolveResult]) -> SolveResult:
    """Feasible results beat infeasible ones; ties break on fitness, then
    on position in the list (stable)."""
    best = results[0]
    for candidate in results[1:]:
        if (candidate.feasible, candidate.objectives.fitness) > (best.feasible, best.objectives.fitness):
            best = candidate
    return best


def _solve_best_of(scenario, mu, mode, config, n_seeds, **kwargs) -> SolveResult:
    def run(offset: int) -> SolveResult:
        return ga_solve(scenario, mu, mode, dataclasses.replace(config, seed=config.seed + offset), **kwargs)

    return _best_result(parallel_map(run, list(range(max(1, n_seeds)))))


@dataclass
class Normalization:
    """Self-normalization references from the two single-objective solves."""

    eta_ref: float
    omega_ref: float
    comm_result: SolveResult
    sensing_result: SolveResult


def normalize_objectives(
    scenario: Scenario,
    config: GaConfig,
    *,
    n_seeds: int = 1,
    fixed_uav_xy: np.ndarray | None = None,
    interference: str = "coherent",
) -> Normalization:
    """Objective scales from one fairness-only solve and one echo-only
    solve, so that normalized objectives lie near [0, 1] on the front."""
    comm = _solve_best_of(
        scenario, 0.0, "comm", config, n_seeds, fixed_uav_xy=fixed_uav_xy, interference=interference
    )
    sensing = _solve_best_of(
        scenario, 1.0, "sensing", config, n_seeds, fixed_uav_xy=fixed_uav_xy, interference=interference
    )
    if not comm.feasible or not math.isfinite(comm.objectives.eta) or comm.objectives.eta <= 0:
        raise InfeasibleScenarioError(
            f"fairness objective could not be normalized: feasible={comm.feasible}, eta={comm.objectives.eta}"
        )
    if not sensing.feasible or sensing.objectives.omega <= 0:
        raise InfeasibleScenarioError(
            f"echo objective could not be normalized: feasible={sensing.feasible}, omega={sensing.objectives.omega}"
        )
    return Normalization(
        eta_ref=comm.objectives.eta,
        omega_ref=sensing.objectives.omega,
        comm_result=comm,
        sensing_result=sensing,
    )


def _endpoint_warm_starts(scenario: Scenario, norm: Normalization) -> list[DesignPoint]:
    """Initial designs for the scalarized solves, built from the two
    single-objective solutions.

    The echo-only solution carries no user beams, which the SINR floor
    would reject outright, so it is embedded with the fairness solution's
    user-power profile scaled into the remaining budget.  A midpoint blend
    seeds the interior of the front.
    """
    comm = norm.comm_result.design
    sense = norm.sensing_result.design
    residual = np.maximum(scenario.p_max - sense.sense_power.sum(axis=1, keepdims=True), 0.0)
    comm_total = comm.comm_power.sum(axis=1, keepdims=True)
    scale = np.where(comm_total > 0, np.minimum(1.0, residual / np.where(comm_total > 0, comm_total, 1.0)), 0.0)
    hybrid = DesignPoint(
        uav_xy=sense.uav_xy,
        comm_power=comm.comm_power * scale,
        sense_power=sense.sense_power,
    )
    midpoint = DesignPoint(
        uav_xy=0.5 * (comm.uav_xy + sense.uav_xy),
        comm_power=0.5 * (comm.comm_power + hybrid.comm_power),
        sense_power=0.5 * (comm.sense_power + sense.sense_power),
    )
    return [comm, hybrid, midpoint]


@dataclass
class ParetoRecord:
    mu: float
    eta: float
    omega: float
    eta_norm: float
    omega_norm: float
    feasible: bool
    design: DesignPoint


def pareto_sweep(
    scenario: Scenario,
    mu_list: list[float],
    config: GaConfig,
    *,
    n_seeds: int = 1,
    fixed_uav_xy: np.ndarray | None = None,
    normalization: Normalization | None = None,
) -> list[ParetoRecord]:
    """One scalarized solve per Pareto weight, sharing one normalization
    pass and one seed list (common random numbers across weights).

    The endpoint weights 0 and 1 reuse the corresponding normalization
    solves outright, since they pose the same problem.  Interior weights
    are solved by the GA and then finalized by a portfolio step: every
    feasible design found anywhere in the sweep is a valid candidate for
    every weight, so each record takes the candidate maximizing its own
    scalarized objective.  That removes solver noise from the trade-off
    curve: a standard exchange argument makes the reported objectives
    exactly monotone in the weight and the record set exactly mutually
    nondominated.
    """
    if not mu_list:
        raise ValueError("mu_list must not be empty")
    if any(mu < 0 or mu > 1 for mu in mu_list):
        raise ValueError(f"Pareto weights must lie in [0, 1], got {mu_list}")
    norm = normalization or normalize_objectives(scenario, config, n_seeds=n_seeds, fixed_uav_xy=fixed_uav_xy)
    norms = (norm.eta_ref, norm.omega_ref)
    warm = _endpoint_warm_starts(scenario, norm)

    def solve_point(mu: float) -> SolveResult | None:
        if mu in (0.0, 1.0):
            return None
        return _solve_best_of(
            scenario, mu, "multi", config, n_seeds, norms=norms, fixed_uav_xy=fixed_uav_xy, warm_starts=warm
        )

    mus = sorted(mu_list)
    raw = dict(zip(mus, parallel_map(solve_point, mus)))

    candidates = [norm.comm_result.design, *warm]
    candidates.extend(result.design for result in raw.values() if result is not None)
    evaluated = [
        fitness(design, scenario, 0.5, norms, mode="multi", penalty_weight=config.penalty_weight)
        for design in candidates
    ]
    pool = [(d, obj) for d, obj in zip(candidates, evaluated) if obj.feasible]
    # If the sweep discovered designs beating a normalization solve, the
    # corresponding reference moves up to the best value actually found,
    # keeping normalized objectives in [0, 1] near the front.
    eta_ref = max(norm.eta_ref, max((o.eta for _, o in pool), default=0.0))
    omega_ref = max(norm.omega_ref, max((o.omega for _, o in pool), default=0.0))

    def record_for(mu: float) -> ParetoRecord:
        if mu == 0.0 or mu == 1.0:
            result = norm.comm_result if mu == 0.0 else norm.sensing_result
            obj = result.objectives
            design, eta, omega, feasible = result.design, obj.eta, obj.omega, result.feasible
        elif pool:
            scores = [mu * o.omega / omega_ref + (1.0 - mu) * o.eta / eta_ref for _, o in pool]
            design, obj = pool[int(np.argmax(scores))]
            eta, omega, feasible = obj.eta, obj.omega, True
        else:
            result = raw[mu]
            obj = result.objectives
            design, eta, omega, feasible = result.design, obj.eta, obj.omega, result.feasible
        return ParetoRecord(
            mu=mu,
            eta=eta,
            omega=omega,
            eta_norm=eta / eta_ref,
            omega_norm=omega / omega_ref,
            feasible=feasible,
            design=design,
        )

    return [record_for(mu) for mu in mus]


def simplex_grid(dims: int, resolution: int) -> np.ndarray:
    """Integer allocations ``n`` with ``n_i >= 0`` and ``sum n <= resolution``."""
    if dims == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if (resolution + 1) ** dims <= 20_000_000:
        axes = np.meshgrid(*[np.arange(resolution + 1)] * dims, indexing="ij")
        grid = np.stack([ax.ravel() for ax in axes], axis=1)
        return grid[grid.sum(axis=1) <= resolution]
    # Stars and bars: one slack part absorbs the unused budget.
    combos = itertools.combinations(range(resolution + dims), dims)
    bars = np.fromiter(itertools.chain.from_iterable(combos), dtype=np.int64).reshape(-1, dims)
    prev = np.hstack([np.full((len(bars), 1), -1), bars[:, :-1]])
    return bars - prev - 1


def grid_oracle(
    scenario: Scenario,
    mu: float,
    mode: str,
    resolution: int,
    *,
    norms: tuple[float, float] | None = None,
    fixed_uav_xy: np.ndarray | None = None,
    q_resolution: int | None = None,
    max_points: int = 6_000_000,
    chunk: int = 200_000,
) -> tuple[DesignPoint, ObjectiveValues]:
    """Exhaustive search over a simplex grid of power allocations,
    optionally crossed with a coarse position lattice.

    Evaluates the exact fitness the GA sees (including decode-time budget
    repair) and returns the best point, so it serves as ground truth for
    ``ga_solve``.  Refuses instances whose grid would be too large.
    """
    if scenario.M != 1:
        raise OracleSizeError(f"oracle supports a single UAV, got M={scenario.M}")
    layout = GenomeLayout.build(scenario, mode, fixed_uav_xy=fixed_uav_xy)
    dims = (scenario.K if layout.include_comm else 0) + scenario.J
    if dims > 4:
        raise OracleSizeError(f"instance too large: {dims} beam powers exceed the 4-dimension oracle guard")
    n_power = math.comb(resolution + dims, dims)
    if q_resolution is not None:
        positions = np.array(
            list(
                itertools.product(
                    np.linspace(scenario.q_min, scenario.q_max, q_resolution),
                    np.linspace(scenario.q_min, scenario.q_max, q_resolution),
                )
            )
        )
    elif fixed_uav_xy is not None:
        positions = np.asarray(fixed_uav_xy, dtype=float).reshape(1, 2)
    else:
        positions = np.array([[scenario.arena / 2.0, scenario.arena / 2.0]])
    if n_power * len(positions) > max_points:
        raise OracleSizeError(
            f"instance too large: {n_power} power allocations x {len(positions)} positions "
            f"exceed the {max_points}-point oracle budget"
        )
    if norms is None:
        norms = objective_scales(scenario)

    powers = simplex_grid(dims, resolution).astype(float) / resolution * scenario.p_max
    best_fit = -np.inf
    best_xy: np.ndarray | None = None
    best_cp: np.ndarray | None = None
    best_sp: np.ndarray | None = None
    for q in positions:
        for lo in range(0, len(powers), chunk):
            block = powers[lo : lo + chunk]
            genomes = np.hstack([np.broadcast_to(q, (len(block), 2)), block])
            xy, cp, sp = layout.decode(genomes)
            batch = evaluate_designs(
                scenario,
                xy[:1] if len(block) > 1 else xy,
                cp,
                sp,
                mode=mode,
                mu=mu,
                norms=norms,
                penalty_weight=GaConfig().penalty_weight,
            )
            idx = int(np.argmax(batch.fitness))
            if batch.fitness[idx] > best_fit:
                best_fit = float(batch.fitness[idx])
                best_xy, best_cp, best_sp = xy[idx], cp[idx], sp[idx]
    design = DesignPoint(uav_xy=best_xy, comm_power=best_cp, sense_power=best_sp)
    objectives = fitness(design, scenario, mu, norms, mode=mode, penalty_weight=GaConfig().penalty_weight)
    return design, objectives


def solve_trajectory(
    scenario: Scenario,
    n_slots: int,
    slot_duration: float,
    v_max: float,
    mu: float,
    config: GaConfig,
    *,
    mode: str = "multi",
    norms: tuple[float, float] | None = None,
) -> list[SolveResult]:
    """Sequential per-slot solves with a reachability constraint.

    Slot ``n`` restricts each UAV position to the disc of radius
    ``v_max * slot_duration`` around slot ``n - 1``'s position (slot 0 is
    unconstrained), so consecutive positions always satisfy the speed
    limit by construction.  Slot ``n`` uses seed ``config.seed + n``.
    """
    if n_slots < 1:
        raise ValueError(f"need at least one slot, got {n_slots}")
    if v_max < 0 or slot_duration <= 0:
        raise ValueError("v_max must be nonnegative and slot_duration positive")
    radius = v_max * slot_duration
    results = []
    prev: np.ndarray | None = None
    for slot in range(n_slots):
        slot_config = dataclasses.replace(config, seed=config.seed + slot)
        result = ga_solve(
            scenario,
            mu,
            mode,
            slot_config,
            norms=norms,
            prev_xy=prev,
            velocity_radius=radius if prev is not None else None,
        )
        results.append(result)
        prev = result.design.uav_xy
    return results
