from .ga import GA_PRESETS, GaConfig, GaResult, ga_maximize
from .design import (
    MODES,
    BatchObjectives,
    DesignPoint,
    GenomeLayout,
    build_matched_beamformers,
    evaluate_constraints,
    evaluate_designs,
    fitness,
    objective_scales,
)
from .solve import (
    InfeasibleScenarioError,
    Normalization,
    OracleSizeError,
    ParetoRecord,
    SolveResult,
    ga_solve,
    grid_oracle,
    normalize_objectives,
    pareto_sweep,
    solve_trajectory,
)

__all__ = [
    "GA_PRESETS",
    "GaConfig",
    "GaResult",
    "ga_maximize",
    "MODES",
    "BatchObjectives",
    "DesignPoint",
    "GenomeLayout",
    "build_matched_beamformers",
    "evaluate_constraints",
    "evaluate_designs",
    "fitness",
    "objective_scales",
    "InfeasibleScenarioError",
    "Normalization",
    "OracleSizeError",
    "ParetoRecord",
    "SolveResult",
    "ga_solve",
    "grid_oracle",
    "normalize_objectives",
    "pareto_sweep",
    "solve_trajectory",
]
