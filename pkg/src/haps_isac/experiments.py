"""Experiment drivers: single solves, the four sweep experiments, the
cross-check validation run, and reproducible result envelopes.

Every experiment returns an :class:`ExperimentResult` whose
``config_echo`` contains the fully concrete scenario (explicit positions),
the solver settings, and the experiment parameters; re-running from the
echo reproduces the rows, and the CSV rendering, byte for byte.

Sweeps share found designs across sweep points where a design from one
point is a valid candidate at another (rescaled for power sweeps,
re-checked against the tighter threshold for gain sweeps).  Each point
then reports the best candidate it admits, which removes solver noise
from the reported trend without touching any physics.
"""

from __future__ import annotations

import dataclasses
import math
import time

import numpy as np

from .geometry import (
    AngleOfDeparture,
    ArrayGeometry,
    aod_from_positions,
    distance as distance3,
    haps_pathloss_amplitude,
    steering_vector,
)
from .linkmetrics import (
    BeamformerSet,
    EchoModel,
    beampattern_gain,
    channel_a2g,
    expected_echo_power,
    monte_carlo_omega,
    monte_carlo_sinr,
    omega as omega_closed_form,
    sinr as sinr_scalar,
)
from .opt import (
    DesignPoint,
    GaConfig,
    build_matched_beamformers,
    fitness,
    ga_solve,
    grid_oracle,
    normalize_objectives,
    pareto_sweep,
    solve_trajectory,
)
from .opt.solve import _solve_best_of
from .runtime import parallel_map
from .scenario import (
    ConfigError,
    Scenario,
    ScenarioConfig,
    generate_scenario,
    linear_to_db,
    resolve_scenario,
)

DEFAULT_MU_GRID = [round(0.1 * i, 1) for i in range(1, 10)]
DEFAULT_PMAX_GRID_DBM = [float(p) for p in range(30, 41)]
DEFAULT_GAMMA_GRID = [1e-6, 1e-5, 1e-4]
DEFAULT_K_GRID = [2, 3, 4, 5, 6]

_CSV_COLUMNS = {
    "single": ["mu", "mode", "eta", "eta_db", "omega", "min_rate", "fitness", "feasible"],
    "pareto": ["mu", "eta", "eta_db", "omega", "eta_norm", "omega_norm", "feasible"],
    "pmax-sweep": ["pmax_dbm", "min_rate", "min_rate_equal", "eta", "feasible"],
    "gamma-sweep": ["gamma_th", "min_sinr", "min_sinr_db", "min_rate", "feasible"],
    "k-sweep": ["k", "mode", "min_rate", "eta", "feasible"],
    "trajectory": ["slot", "x", "y", "eta", "eta_db", "omega", "min_rate", "feasible"],
    "validate": ["check", "status", "detail"],
}


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@dataclasses.dataclass
class ExperimentResult:
    kind: str
    columns: list[str]
    rows: list[dict]
    config_echo: dict
    seeds: list[int]
    wall_time: float

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_format_cell(row[col]) for col in self.columns))
        return "\n".join(lines) + "\n"

    def to_envelope(self) -> dict:
        return {
            "kind": self.kind,
            "columns": self.columns,
            "rows": self.rows,
            "config_echo": self.config_echo,
            "seeds": self.seeds,
            "wall_time": self.wall_time,
            "csv": self.to_csv(),
        }


def _echo(kind: str, scenario_config: ScenarioConfig, ga: GaConfig, experiment: dict) -> dict:
    return {
        "kind": kind,
        "scenario": scenario_config.to_dict(),
        "ga": dataclasses.asdict(ga),
        "experiment": experiment,
    }


def _prepare(config: ScenarioConfig) -> tuple[ScenarioConfig, Scenario]:
    concrete = generate_scenario(config)
    return concrete, resolve_scenario(concrete)


def run_single(
    config: ScenarioConfig,
    ga: GaConfig,
    mu: float = 0.5,
    mode: str = "multi",
    n_seeds: int = 1,
) -> ExperimentResult:
    """Solve one instance and report its objectives."""
    t0 = time.perf_counter()
    concrete, scenario = _prepare(config)
    norms = None
    if mode == "multi":
        norm = normalize_objectives(scenario, ga, n_seeds=n_seeds)
        norms = (norm.eta_ref, norm.omega_ref)
    result = _solve_best_of(scenario, mu, mode, ga, n_seeds, norms=norms)
    obj = result.objectives
    rows = [
        {
            "mu": float(mu),
            "mode": mode,
            "eta": obj.eta,
            "eta_db": linear_to_db(obj.eta),
            "omega": obj.omega,
            "min_rate": obj.min_rate,
            "fitness": obj.fitness,
            "feasible": result.feasible,
        }
    ]
    echo = _echo("single", concrete, ga, {"mu": mu, "mode": mode, "n_seeds": n_seeds})
    echo["design"] = {
        "uav_xy": result.design.uav_xy.tolist(),
        "comm_power": result.design.comm_power.tolist(),
        "sense_power": result.design.sense_power.tolist(),
    }
    return ExperimentResult(
        kind="single",
        columns=_CSV_COLUMNS["single"],
        rows=rows,
        config_echo=echo,
        seeds=[ga.seed + i for i in range(n_seeds)],
        wall_time=time.perf_counter() - t0,
    )


def run_pareto(
    config: ScenarioConfig,
    ga: GaConfig,
    mu_list: list[float] | None = None,
    n_seeds: int = 3,
) -> ExperimentResult:
    """Trade-off sweep over the scalarization weight."""
    t0 = time.perf_counter()
    mu_list = list(mu_list) if mu_list is not None else list(DEFAULT_MU_GRID)
    concrete, scenario = _prepare(config)
    records = pareto_sweep(scenario, mu_list, ga, n_seeds=n_seeds)
    rows = [
        {
            "mu": r.mu,
            "eta": r.eta,
            "eta_db": linear_to_db(r.eta),
            "omega": r.omega,
            "eta_norm": r.eta_norm,
            "omega_norm": r.omega_norm,
            "feasible": r.feasible,
        }
        for r in records
    ]
    return ExperimentResult(
        kind="pareto",
        columns=_CSV_COLUMNS["pareto"],
        rows=rows,
        config_echo=_echo("pareto", concrete, ga, {"mu_list": mu_list, "n_seeds": n_seeds}),
        seeds=[ga.seed + i for i in range(n_seeds)],
        wall_time=time.perf_counter() - t0,
    )


def _equal_split_reference(scenario: Scenario, optimized: DesignPoint) -> DesignPoint:
    """Unoptimized power-allocation reference.

    Keeps the optimized design's position and sensing powers (so both
    designs carry the same sensing burden) but splits the remaining
    budget equally over the user beams, isolating the benefit of
    optimizing the per-user allocation.
    """
    residual = np.maximum(scenario.p_max - optimized.sense_power.sum(axis=1, keepdims=True), 0.0)
    share = residual / scenario.K if scenario.K else residual * 0.0
    return DesignPoint(
        uav_xy=optimized.uav_xy,
        comm_power=np.tile(share, (1, scenario.K)),
        sense_power=optimized.sense_power,
    )


def run_pmax_sweep(
    config: ScenarioConfig,
    ga: GaConfig,
    pmax_list_dbm: list[float] | None = None,
    n_seeds: int = 1,
    interference: str = "coherent",
) -> ExperimentResult:
    """Worst-user rate against the transmit power budget.

    Each budget point is solved in fairness mode and then finalized
    against the shared candidate pool: every design found at one budget,
    rescaled to another budget, is a valid candidate there when it stays
    feasible, and power-scaling a fixed allocation can only raise every
    SINR.  The unoptimized reference splits the budget equally over all
    beams at the arena center.
    """
    t0 = time.perf_counter()
    grid = [float(p) for p in (pmax_list_dbm if pmax_list_dbm is not None else DEFAULT_PMAX_GRID_DBM)]
    if not grid:
        raise ConfigError("pmax_list_dbm must not be empty")
    concrete, _ = _prepare(config)

    scenarios = [resolve_scenario(dataclasses.replace(concrete, P_max=p)) for p in grid]
    solves = parallel_map(
        lambda sc: _solve_best_of(sc, 0.0, "comm", ga, n_seeds, interference=interference),
        scenarios,
    )
    # Portfolio finalization: candidate shapes from every budget point.
    shapes = [(res.design, sc.p_max) for res, sc in zip(solves, scenarios)]
    rows = []
    for pmax_dbm, scenario, own in zip(grid, scenarios, solves):
        best_eta = own.objectives.eta if own.feasible else -1.0
        best_design = own.design
        best_feasible = own.feasible
        for design, source_pmax in shapes:
            scale = scenario.p_max / source_pmax
            candidate = DesignPoint(
                uav_xy=design.uav_xy,
                comm_power=design.comm_power * scale,
                sense_power=design.sense_power * scale,
            )
            obj = fitness(
                candidate, scenario, 0.0, mode="comm", penalty_weight=ga.penalty_weight, interference=interference
            )
            if obj.feasible and obj.eta > best_eta:
                best_eta = obj.eta
                best_design = candidate
                best_feasible = True
        eta = max(best_eta, 0.0)
        reference = _equal_split_reference(scenario, best_design)
        equal = fitness(reference, scenario, 0.0, mode="comm", interference=interference)
        rows.append(
            {
                "pmax_dbm": pmax_dbm,
                "min_rate": math.log2(1.0 + eta),
                "min_rate_equal": equal.min_rate,
                "eta": eta,
                "feasible": best_feasible,
            }
        )
    return ExperimentResult(
        kind="pmax-sweep",
        columns=_CSV_COLUMNS["pmax-sweep"],
        rows=rows,
        config_echo=_echo(
            "pmax-sweep", concrete, ga, {"pmax_list_dbm": grid, "n_seeds": n_seeds, "interference": interference}
        ),
        seeds=[ga.seed + i for i in range(n_seeds)],
        wall_time=time.perf_counter() - t0,
    )


def run_gamma_sweep(
    config: ScenarioConfig,
    ga: GaConfig,
    gamma_list: list[float] | None = None,
    n_seeds: int = 1,
) -> ExperimentResult:
    """Worst-user SINR against the beampattern-gain threshold.

    The feasible sets are nested (a design feasible at a threshold is
    feasible at every lower one), so the shared candidate pool makes the
    reported trend exactly nonincreasing; a point no candidate satisfies
    is flagged infeasible and reports its own best attempt.
    """
    t0 = time.perf_counter()
    grid = [float(g) for g in (gamma_list if gamma_list is not None else DEFAULT_GAMMA_GRID)]
    if not grid:
        raise ConfigError("gamma_list must not be empty")
    concrete, _ = _prepare(config)

    scenarios = [resolve_scenario(dataclasses.replace(concrete, gamma_th=g)) for g in grid]
    solves = parallel_map(
        lambda sc: _solve_best_of(sc, 0.0, "comm", ga, n_seeds),
        scenarios,
    )
    designs = [res.design for res in solves]
    rows = []
    for gamma, scenario, own in zip(grid, scenarios, solves):
        best_eta = own.objectives.eta if own.feasible else -1.0
        feasible = own.feasible
        for design in designs:
            obj = fitness(design, scenario, 0.0, mode="comm", penalty_weight=ga.penalty_weight)
            if obj.feasible and obj.eta > best_eta:
                best_eta = obj.eta
                feasible = True
        eta = best_eta if feasible else own.objectives.eta
        rows.append(
            {
                "gamma_th": gamma,
                "min_sinr": eta,
                "min_sinr_db": linear_to_db(eta),
                "min_rate": math.log2(1.0 + max(eta, 0.0)),
                "feasible": feasible,
            }
        )
    return ExperimentResult(
        kind="gamma-sweep",
        columns=_CSV_COLUMNS["gamma-sweep"],
        rows=rows,
        config_echo=_echo("gamma-sweep", concrete, ga, {"gamma_list": grid, "n_seeds": n_seeds}),
        seeds=[ga.seed + i for i in range(n_seeds)],
        wall_time=time.perf_counter() - t0,
    )


def run_k_sweep_with_baseline(
    config: ScenarioConfig,
    ga: GaConfig,
    k_list: list[int] | None = None,
    proposed_mu: float = 0.0,
    n_seeds: int = 1,
    interference: str = "coherent",
) -> ExperimentResult:
    """Worst-user rate against the user count, for the full model and the
    UAV-only baseline.

    ``proposed`` optimizes the communication metric inside the full joint
    model (sensing budget cap, per-user SINR floor, echo objective
    available through ``proposed_mu``); ``baseline`` solves the
    fairness-only problem with no backhaul stage.  Both use the same
    solver and seeds.  Because the placement stream is shared, the user
    set at a smaller count is a prefix of the set at a larger count, so
    dropping users from a found design yields a valid candidate for every
    smaller count: each point reports the best candidate it admits, which
    makes the trend exact.
    """
    t0 = time.perf_counter()
    k_list = [int(k) for k in (k_list if k_list is not None else DEFAULT_K_GRID)]
    if not k_list or any(k < 1 for k in k_list):
        raise ConfigError("k_list must hold positive user counts")
    concrete_base = generate_scenario(config)
    ks = sorted(set(k_list))
    # Users are redrawn per count from the shared placement stream (the
    # smaller sets are prefixes of the larger ones); targets and the HAPS
    # stay fixed across the sweep.
    concretes = {
        k: generate_scenario(
            dataclasses.replace(
                config,
                K=k,
                cu_positions=None,
                target_positions=concrete_base.target_positions,
                haps_xy=concrete_base.haps_xy,
            )
        )
        for k in ks
    }
    scenarios = {k: resolve_scenario(concretes[k]) for k in ks}

    def solve_mode(item):
        k, mode = item
        scenario = scenarios[k]
        if mode == "proposed":
            norms = None
            if proposed_mu > 0.0:
                norm = normalize_objectives(scenario, ga, n_seeds=n_seeds, interference=interference)
                norms = (norm.eta_ref, norm.omega_ref)
            return _solve_best_of(
                scenario, proposed_mu, "multi", ga, n_seeds, norms=norms, interference=interference
            )
        return _solve_best_of(scenario, 0.0, "baseline", ga, n_seeds, interference=interference)

    jobs = [(k, mode) for k in ks for mode in ("proposed", "baseline")]
    solved = dict(zip(jobs, parallel_map(solve_mode, jobs)))

    rows = []
    for k in ks:
        for mode in ("proposed", "baseline"):
            own = solved[(k, mode)]
            solver_mode = "multi" if mode == "proposed" else "baseline"
            best_eta = own.objectives.eta if own.feasible else -1.0
            feasible = own.feasible
            # Designs found at larger user counts serve the smaller ones
            # once the extra user beams are dropped.
            for k_src in ks:
                if k_src < k:
                    continue
                source = solved[(k_src, mode)].design
                candidate = DesignPoint(
                    uav_xy=source.uav_xy,
                    comm_power=source.comm_power[:, :k],
                    sense_power=source.sense_power,
                )
                obj = fitness(
                    candidate,
                    scenarios[k],
                    proposed_mu,
                    mode=solver_mode,
                    penalty_weight=ga.penalty_weight,
                    interference=interference,
                )
                if obj.feasible and obj.eta > best_eta:
                    best_eta = obj.eta
                    feasible = True
            eta = best_eta if feasible else own.objectives.eta
            rows.append(
                {
                    "k": k,
                    "mode": mode,
                    "min_rate": math.log2(1.0 + max(eta, 0.0)),
                    "eta": eta,
                    "feasible": feasible,
                }
            )
    return ExperimentResult(
        kind="k-sweep",
        columns=_CSV_COLUMNS["k-sweep"],
        rows=rows,
        config_echo=_echo(
            "k-sweep",
            concrete_base,
            ga,
            {"k_list": ks, "proposed_mu": proposed_mu, "n_seeds": n_seeds, "interference": interference},
        ),
        seeds=[ga.seed + i for i in range(n_seeds)],
        wall_time=time.perf_counter() - t0,
    )


def run_trajectory(
    config: ScenarioConfig,
    ga: GaConfig,
    n_slots: int,
    slot_duration: float,
    v_max: float,
    mu: float = 0.5,
    mode: str = "multi",
    n_seeds: int = 1,
) -> ExperimentResult:
    """Sequential per-slot optimization under the speed limit."""
    t0 = time.perf_counter()
    concrete, scenario = _prepare(config)
    norms = None
    if mode == "multi":
        norm = normalize_objectives(scenario, ga, n_seeds=n_seeds)
        norms = (norm.eta_ref, norm.omega_ref)
    results = solve_trajectory(scenario, n_slots, slot_duration, v_max, mu, ga, mode=mode, norms=norms)
    rows = [
        {
            "slot": slot,
            "x": float(res.design.uav_xy[0, 0]),
            "y": float(res.design.uav_xy[0, 1]),
            "eta": res.objectives.eta,
            "eta_db": linear_to_db(res.objectives.eta),
            "omega": res.objectives.omega,
            "min_rate": res.objectives.min_rate,
            "feasible": res.feasible,
        }
        for slot, res in enumerate(results)
    ]
    return ExperimentResult(
        kind="trajectory",
        columns=_CSV_COLUMNS["trajectory"],
        rows=rows,
        config_echo=_echo(
            "trajectory",
            concrete,
            ga,
            {"n_slots": n_slots, "slot_duration": slot_duration, "v_max": v_max, "mu": mu, "mode": mode},
        ),
        seeds=[ga.seed + i for i in range(n_slots)],
        wall_time=time.perf_counter() - t0,
    )


def run_validate(config: ScenarioConfig, ga: GaConfig | None = None) -> ExperimentResult:
    """Cross-checks of the closed forms against their independent oracles."""
    t0 = time.perf_counter()
    ga = ga or GaConfig(population=60, generations=60, elite_count=3)
    concrete, scenario = _prepare(config)
    rows: list[dict] = []

    def check(name: str, ok: bool, detail: str) -> None:
        rows.append({"check": name, "status": "pass" if ok else "fail", "detail": detail})

    rng = np.random.default_rng(2024)

    # Steering identities on random geometries and directions.
    worst = 0.0
    for _ in range(200):
        geom = ArrayGeometry(int(rng.integers(1, 6)), int(rng.integers(1, 6)), float(rng.uniform(0.2, 1.0)))
        aod = AngleOfDeparture(float(rng.uniform(0, math.pi / 2)), float(rng.uniform(-math.pi, math.pi)))
        entries = steering_vector(geom, aod).entries
        worst = max(worst, abs(np.vdot(entries, entries).real - geom.size) / geom.size)
    check("steering_self_product", worst < 1e-9, f"max relative error {worst:.3e}")

    # Matched single-beam gain equals power times element count.
    geom = scenario.uav_geom
    uav = scenario.uav_position([scenario.arena / 3, scenario.arena / 2])
    target = scenario.target_positions[0][0]
    power = 2.5
    a_target = steering_vector(geom, aod_from_positions(uav, target)).entries
    bf = BeamformerSet(
        comm=np.zeros((0, geom.size), dtype=complex),
        sense=(math.sqrt(power) * a_target / math.sqrt(geom.size))[None, :],
    )
    gain = beampattern_gain(uav, target, geom, bf)
    gain_err = abs(gain - power * geom.size) / (power * geom.size)
    check("matched_beampattern_gain", gain_err < 1e-9, f"relative error {gain_err:.3e}")

    # Monte-Carlo SINR against the closed form.
    design = DesignPoint(
        uav_xy=np.tile([[scenario.arena / 2, scenario.arena / 2]], (scenario.M, 1)),
        comm_power=np.full((scenario.M, scenario.K), 0.4),
        sense_power=np.full((scenario.M, scenario.J), 0.2),
    )
    bf_sets = build_matched_beamformers(design, scenario)
    channels = [
        channel_a2g(scenario.beta0, scenario.uav_position(design.uav_xy[0]), cu, geom)
        for cu in scenario.cu_positions[0]
    ]
    analytic = sinr_scalar(0, channels, bf_sets[0], scenario.noise_power)
    mc = monte_carlo_sinr(0, channels, bf_sets[0], scenario.noise_power, 200_000, seed=7)
    err = abs(mc.estimate - analytic) / analytic
    ok = err < 0.05 and abs(mc.estimate - analytic) <= 4 * mc.stderr
    check("monte_carlo_sinr", ok, f"relative error {err:.3e}, stderr {mc.stderr:.3e}")

    # HAPS echo power: combiner algebra against the symbol-level build.
    positions = [scenario.uav_position(design.uav_xy[m]) for m in range(scenario.M)]
    closed = omega_closed_form(scenario, bf_sets, positions)
    simulated = monte_carlo_omega(scenario, bf_sets, positions, num_symbols=400, seed=11)
    omega_err = abs(simulated - closed) / closed if closed > 0 else abs(simulated - closed)
    check("monte_carlo_omega", omega_err < 0.25, f"relative error {omega_err:.3e}")

    # Single-UAV factorization of the combined echo power.
    dists = [distance3(positions[0], t) for t in scenario.target_positions[0]]
    amps = scenario.echo.amplitudes(scenario.beta0, np.asarray(dists))
    echo_power = expected_echo_power(bf_sets[0], EchoModel(reflection_amp=amps), geom.size)
    delta = haps_pathloss_amplitude(distance3(positions[0], scenario.haps_position), scenario.carrier_freq)
    factored = (geom.size * scenario.haps_geom.size * delta) ** 2 * echo_power
    fact_err = abs(factored - closed) / closed if closed > 0 else 0.0
    check("omega_factorization", fact_err < 1e-9, f"relative error {fact_err:.3e}")

    # Scalar metrics against the vectorized evaluator.
    obj = fitness(design, scenario, 0.5, mode="multi")
    eta_scalar = min(
        sinr_scalar(k, channels, bf_sets[0], scenario.noise_power) for k in range(scenario.K)
    )
    scal_err = abs(obj.eta - eta_scalar) / eta_scalar if eta_scalar > 0 else abs(obj.eta - eta_scalar)
    check("batch_vs_scalar_sinr", scal_err < 1e-9, f"relative error {scal_err:.3e}")

    # Solver against the exhaustive oracle on a reduced instance.
    small = dataclasses.replace(
        concrete, K=2, J=1, cu_positions=None, target_positions=None, placement_seed=config.placement_seed
    )
    small_sc = resolve_scenario(generate_scenario(small))
    center = np.array([[scenario.arena / 2, scenario.arena / 2]])
    ga_res = ga_solve(small_sc, 0.3, "multi", ga, fixed_uav_xy=center)
    _, oracle_obj = grid_oracle(small_sc, 0.3, "multi", 60, fixed_uav_xy=center)
    gap = (oracle_obj.fitness - ga_res.objectives.fitness) / max(abs(oracle_obj.fitness), 1e-12)
    check("ga_vs_grid_oracle", gap < 0.02, f"oracle-GA fitness gap {gap:.3e}")

    all_pass = all(r["status"] == "pass" for r in rows)
    echo = _echo("validate", concrete, ga, {})
    echo["all_pass"] = all_pass
    return ExperimentResult(
        kind="validate",
        columns=_CSV_COLUMNS["validate"],
        rows=rows,
        config_echo=echo,
        seeds=[ga.seed],
        wall_time=time.perf_counter() - t0,
    )


def run_from_echo(echo: dict) -> ExperimentResult:
    """Re-run an experiment from a result envelope's ``config_echo``."""
    try:
        kind = echo["kind"]
        scenario_config = ScenarioConfig.from_dict(echo["scenario"])
        ga = GaConfig(**echo["ga"])
        params = echo.get("experiment", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config echo: {exc}") from exc
    if kind == "single":
        return run_single(scenario_config, ga, params["mu"], params["mode"], params.get("n_seeds", 1))
    if kind == "pareto":
        return run_pareto(scenario_config, ga, params["mu_list"], params.get("n_seeds", 3))
    if kind == "pmax-sweep":
        return run_pmax_sweep(
            scenario_config,
            ga,
            params["pmax_list_dbm"],
            params.get("n_seeds", 1),
            params.get("interference", "coherent"),
        )
    if kind == "gamma-sweep":
        return run_gamma_sweep(scenario_config, ga, params["gamma_list"], params.get("n_seeds", 1))
    if kind == "k-sweep":
        return run_k_sweep_with_baseline(
            scenario_config,
            ga,
            params["k_list"],
            params.get("proposed_mu", 0.0),
            params.get("n_seeds", 1),
            params.get("interference", "coherent"),
        )
    if kind == "trajectory":
        return run_trajectory(
            scenario_config,
            ga,
            params["n_slots"],
            params["slot_duration"],
            params["v_max"],
            params.get("mu", 0.5),
            params.get("mode", "multi"),
        )
    if kind == "validate":
        return run_validate(scenario_config, ga)
    raise ConfigError(f"unknown experiment kind {kind!r}")
