"""FastAPI service exposing scenario generation, single solves, the sweep
experiments, and the cross-check validator.

Solve endpoints run synchronously; sweep requests can take minutes at the
``paper`` preset, so clients should use generous timeouts.  Scenario or
solver validation problems map to 400, infeasible scenarios to 409.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..experiments import (
    ExperimentResult,
    run_from_echo,
    run_gamma_sweep,
    run_k_sweep_with_baseline,
    run_pareto,
    run_pmax_sweep,
    run_single,
    run_trajectory,
    run_validate,
)
from ..opt import InfeasibleScenarioError, OracleSizeError
from ..scenario import ConfigError, generate_scenario
from .models import (
    ExperimentResponse,
    GammaSweepRequest,
    GenerateRequest,
    HealthResponse,
    KSweepRequest,
    ParetoRequest,
    PmaxSweepRequest,
    RerunRequest,
    ScenarioResponse,
    SolveRequest,
    TrajectoryRequest,
    ValidateRequest,
)

SERVICE_NAME = "haps-isac"


def _respond(result: ExperimentResult) -> ExperimentResponse:
    return ExperimentResponse(**result.to_envelope())


def create_app() -> FastAPI:
    app = FastAPI(title=SERVICE_NAME, version=__version__)

    def guarded(fn):
        try:
            return fn()
        except (ConfigError, OracleSizeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except InfeasibleScenarioError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", service=SERVICE_NAME, version=__version__)

    @app.post("/scenario/generate", response_model=ScenarioResponse)
    def generate(request: GenerateRequest) -> ScenarioResponse:
        concrete = guarded(lambda: generate_scenario(request.scenario.to_config()))
        return ScenarioResponse(scenario=concrete.to_dict())

    @app.post("/solve", response_model=ExperimentResponse)
    def solve(request: SolveRequest) -> ExperimentResponse:
        result = guarded(
            lambda: run_single(
                request.scenario.to_config(),
                request.ga.to_config(),
                request.mu,
                request.mode,
                request.n_seeds,
            )
        )
        return _respond(result)

    @app.post("/experiments/pareto", response_model=ExperimentResponse)
    def pareto(request: ParetoRequest) -> ExperimentResponse:
        result = guarded(
            lambda: run_pareto(
                request.scenario.to_config(),
                request.ga.to_config(),
                request.mu_list,
                request.n_seeds,
            )
        )
        return _respond(result)

    @app.post("/experiments/pmax", response_model=ExperimentResponse)
    def pmax(request: PmaxSweepRequest) -> ExperimentResponse:
        result = guarded(
            lambda: run_pmax_sweep(
                request.scenario.to_config(),
                request.ga.to_config(),
                request.pmax_list_dbm,
                request.n_seeds,
                request.interference,
            )
        )
        return _respond(result)

    @app.post("/experiments/gamma", response_model=ExperimentResponse)
    def gamma(request: GammaSweepRequest) -> ExperimentResponse:
        result = guarded(
            lambda: run_gamma_sweep(
                request.scenario.to_config(),
                request.ga.to_config(),
                request.gamma_list,
                request.n_seeds,
            )
        )
        return _respond(result)

    @app.post("/experiments/k", response_model=ExperimentResponse)
    def k_sweep(request: KSweepRequest) -> ExperimentResponse:
        result = guarded(
            lambda: run_k_sweep_with_baseline(
                request.scenario.to_config(),
                request.ga.to_config(),
                request.k_list,
                request.proposed_mu,
                request.n_seeds,
                request.interference,
            )
        )
        return _respond(result)

    @app.post("/experiments/trajectory", response_model=ExperimentResponse)
    def trajectory(request: TrajectoryRequest) -> ExperimentResponse:
        result = guarded(
            lambda: run_trajectory(
                request.scenario.to_config(),
                request.ga.to_config(),
                request.n_slots,
                request.slot_duration,
                request.v_max,
                request.mu,
                request.mode,
            )
        )
        return _respond(result)

    @app.post("/experiments/rerun", response_model=ExperimentResponse)
    def rerun(request: RerunRequest) -> ExperimentResponse:
        return _respond(guarded(lambda: run_from_echo(request.config_echo)))

    @app.post("/validate", response_model=ExperimentResponse)
    def validate(request: ValidateRequest) -> ExperimentResponse:
        return _respond(guarded(lambda: run_validate(request.scenario.to_config())))

    return app
