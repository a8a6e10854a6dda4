"""Real-coded genetic algorithm: tournament selection, blend crossover,
bound-projected Gaussian mutation, elitism, and a stall criterion.

The engine is generic: it maximizes any batch fitness callback over a
box.  Randomness is drawn from per-generation streams keyed on
``(seed, generation)`` with fixed per-individual slots, so results are
bit-identical no matter how the fitness evaluations are parallelized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

TOURNAMENT_SIZE = 3
BLEND_ALPHA = 0.5


@dataclass(frozen=True)
class GaConfig:
    """Solver settings.

    ``desk`` keeps runs in the seconds range; ``paper`` mirrors the
    published solver table (population 1700, 1000 generations, crossover
    fraction 0.87, function tolerance 1e-7).
    """

    population: int = 200
    generations: int = 200
    crossover_fraction: float = 0.87
    elite_count: int = 10
    mutation_scale: float = 0.1
    function_tolerance: float = 1e-7
    stall_generations: int = 50
    penalty_weight: float = 1e3
    seed: int = 0

    def __post_init__(self):
        if self.population < 2:
            raise ValueError(f"population must be at least 2, got {self.population}")
        if not 0.0 <= self.crossover_fraction <= 1.0:
            raise ValueError(f"crossover_fraction must lie in [0, 1], got {self.crossover_fraction}")
        if not self.function_tolerance > 0:
            raise ValueError(f"function_tolerance must be positive, got {self.function_tolerance}")
        if not 0 <= self.elite_count < self.population:
            raise ValueError(f"elite_count must lie in [0, population), got {self.elite_count}")
        if self.generations < 1:
            raise ValueError(f"generations must be positive, got {self.generations}")
        if self.stall_generations < 1:
            raise ValueError(f"stall_generations must be positive, got {self.stall_generations}")
        if not self.mutation_scale > 0:
            raise ValueError(f"mutation_scale must be positive, got {self.mutation_scale}")


GA_PRESETS = {
    "desk": GaConfig(),
    "paper": GaConfig(population=1700, generations=1000, elite_count=85, stall_generations=100),
}


@dataclass
class GaResult:
    best_genome: np.ndarray
    best_fitness: float
    history: np.ndarray
    generations_run: int


def _tournament(rng: np.random.Generator, fitness: np.ndarray, count: int) -> np.ndarray:
    """Indices of ``count`` tournament winners (first max wins ties)."""
    contestants = rng.integers(0, len(fitness), size=(count, TOURNAMENT_SIZE))
    winners = np.argmax(fitness[contestants], axis=1)
    return contestants[np.arange(count), winners]


def ga_maximize(
    evaluate: Callable[[np.ndarray], np.ndarray],
    lower: np.ndarray,
    upper: np.ndarray,
    config: GaConfig,
    initial_genomes: np.ndarray | None = None,
) -> GaResult:
    """Maximize ``evaluate`` over the box ``[lower, upper]``.

    ``evaluate`` receives a ``(population, n_genes)`` array and returns a
    fitness value per row.  Stops after ``generations`` generations or
    when the best fitness improved by less than ``function_tolerance``
    over the last ``stall_generations`` generations.  ``initial_genomes``
    rows are injected into the initial population (warm starts), replacing
    the first random individuals.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.shape != upper.shape or lower.ndim != 1:
        raise ValueError("lower and upper bounds must be 1-D arrays of equal length")
    if np.any(lower > upper):
        raise ValueError("lower bounds must not exceed upper bounds")
    n_genes = len(lower)
    span = upper - lower
    pop_size = config.population

    rng = np.random.default_rng([config.seed, 0])
    pop = lower + rng.random((pop_size, n_genes)) * span
    if initial_genomes is not None and len(initial_genomes):
        seeds = np.clip(np.atleast_2d(initial_genomes)[:pop_size], lower, upper)
        pop[: len(seeds)] = seeds

    best_genome = pop[0].copy()
    best_fitness = -np.inf
    history: list[float] = []

    n_elite = config.elite_count
    n_offspring = pop_size - n_elite
    n_cross = int(round(config.crossover_fraction * n_offspring))
    n_mut = n_offspring - n_cross

    generations_run = 0
    for gen in range(config.generations):
        fitness = np.asarray(evaluate(pop), dtype=float)
        generations_run = gen + 1
        order = np.argsort(-fitness, kind="stable")
        if fitness[order[0]] > best_fitness:
            best_fitness = float(fitness[order[0]])
            best_genome = pop[order[0]].copy()
        history.append(best_fitness)

        if len(history) > config.stall_generations:
            if history[-1] - history[-1 - config.stall_generations] < config.function_tolerance:
                break
        if gen == config.generations - 1:
            break

        rng = np.random.default_rng([config.seed, gen + 1])
        elites = pop[order[:n_elite]]
        parents = _tournament(rng, fitness, 2 * n_cross + n_mut)
        children = []
        if n_cross:
            pa = pop[parents[:n_cross]]
            pb = pop[parents[n_cross : 2 * n_cross]]
            mix = rng.uniform(-BLEND_ALPHA, 1.0 + BLEND_ALPHA, size=(n_cross, n_genes))
            children.append(pa + mix * (pb - pa))
        if n_mut:
            base = pop[parents[2 * n_cross :]]
            steps = rng.standard_normal((n_mut, n_genes)) * (config.mutation_scale * span)
            children.append(base + steps)
        offspring = np.clip(np.vstack(children), lower, upper) if children else np.empty((0, n_genes))
        pop = np.vstack([elites, offspring])

    return GaResult(
        best_genome=best_genome,
        best_fitness=best_fitness,
        history=np.asarray(history),
        generations_run=generations_run,
    )
