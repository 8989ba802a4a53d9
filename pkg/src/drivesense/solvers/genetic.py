"""Genetic search over fixed-cardinality bit strings, seeded by the hotspot ranking.

A chromosome has one bit per agent (sorted id order) and exactly k ones.
Each generation keeps the best individuals, replaces the worst fraction with
children bred from the elite fraction by single-point crossover, and repairs
children whose one-count drifted away from k by random bit flips.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import List, Optional

from ..coverage import CoverageModel
from ..errors import BudgetExceededError
from .exhaustive import DEFAULT_BUDGET, require_budget, top_combinations
from .hotspot import hotspot_fleet
from .report import SolveReport, check_budget_k


@dataclass(frozen=True)
class GaParams:
    population_size: int = 40
    max_iterations: int = 20
    replace_fraction: Fraction = Fraction(1, 5)
    convergence_patience: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "replace_fraction", Fraction(str(self.replace_fraction))
                           if isinstance(self.replace_fraction, float) else Fraction(self.replace_fraction))
        if self.population_size < 4:
            raise ValueError("population_size must be at least 4")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not 0 < self.replace_fraction < 1:
            raise ValueError("replace_fraction must lie strictly between 0 and 1")
        if self.replace_fraction * self.population_size < 1:
            raise ValueError("replace_fraction * population_size must be at least 1")
        if self.convergence_patience < 1:
            raise ValueError("convergence_patience must be positive")

    @property
    def n_replace(self) -> int:
        return math.ceil(self.replace_fraction * self.population_size)


def to_chromosome(indices, n: int) -> tuple:
    chosen = set(indices)
    return tuple(1 if i in chosen else 0 for i in range(n))


def ones(chrom) -> tuple:
    return tuple(i for i, bit in enumerate(chrom) if bit)


def crossover(a: tuple, b: tuple, cut: int):
    """Swap the tails of two parents after position ``cut``."""
    return a[:cut] + b[cut:], b[:cut] + a[cut:]


def repair(chrom: tuple, k: int, rng: random.Random) -> tuple:
    """Flip random bits until exactly ``k`` are set.

    Surplus ones are cleared one uniformly chosen position at a time; missing
    ones are added the same way among the zeros.
    """
    bits = list(chrom)
    count = sum(bits)
    while count > k:
        bits[rng.choice([i for i, b in enumerate(bits) if b])] = 0
        count -= 1
    while count < k:
        bits[rng.choice([i for i, b in enumerate(bits) if not b])] = 1
        count += 1
    return tuple(bits)


def _random_chromosome(n: int, k: int, rng: random.Random) -> tuple:
    return to_chromosome(rng.sample(range(n), k), n)


def solve_genetic(model: CoverageModel, k: int, params: Optional[GaParams] = None,
                  budget: int = DEFAULT_BUDGET, trace: Optional[list] = None) -> SolveReport:
    """Run the genetic search and return the best chromosome ever seen.

    ``trace``, when given, receives every chromosome at the moment it is
    first scored.
    """
    params = params or GaParams()
    check_budget_k(model, k)
    n = len(model.agent_ids)
    pop_size = params.population_size
    if pop_size > comb(n, k):
        raise ValueError(
            f"population_size {pop_size} exceeds the {comb(n, k)} distinct selections of {k} out of {n}"
        )
    start_evals = model.evaluations
    t0 = time.perf_counter()
    rng = random.Random(params.rng_seed)
    warnings = []

    masked, pool = hotspot_fleet(model)
    seeds: List[tuple] = []
    hotspot_evals = 0
    if len(pool) >= k:
        try:
            require_budget(len(pool), k, budget)
            seeds = top_combinations(masked, pool, k, pop_size)
            hotspot_evals = masked.evaluations
        except BudgetExceededError as exc:
            warnings.append(f"hotspot seeding skipped: {exc}")
    else:
        warnings.append(f"only {len(pool)} agents touch a hotspot; initial population is random")

    population = []
    seen = set()
    for combo in seeds:
        chrom = to_chromosome(combo, n)
        if chrom not in seen:
            seen.add(chrom)
            population.append(chrom)
    n_seeded = len(population)
    while len(population) < pop_size:
        chrom = _random_chromosome(n, k, rng)
        if chrom not in seen:
            seen.add(chrom)
            population.append(chrom)

    fitness = {}

    def rank_key(chrom):
        values = fitness.get(chrom)
        if values is None:
            idx = ones(chrom)
            if len(idx) != k:
                raise AssertionError(f"chromosome with {len(idx)} ones scored for k={k}")
            values = model.slot_values(idx)
            fitness[chrom] = values
            if trace is not None:
                trace.append(chrom)
        return sum(values), min(values), tuple(-i for i in ones(chrom))

    population.sort(key=rank_key, reverse=True)
    best = population[0]
    initial_best = best
    history = [model.to_score(fitness[best]).ccv]
    n_replace = params.n_replace
    n_elite = min(n_replace, pop_size)
    stagnant = 0
    generations = 0
    converged = False

    for _ in range(params.max_iterations):
        elite = population[:n_elite]
        children = []
        while len(children) < n_replace:
            p1, p2 = rng.sample(elite, 2) if len(elite) > 1 else (elite[0], elite[0])
            cut = rng.randint(1, n - 1)
            for child in crossover(p1, p2, cut):
                if len(children) < n_replace:
                    children.append(repair(child, k, rng))
        population = population[: pop_size - n_replace] + children
        population.sort(key=rank_key, reverse=True)
        generations += 1
        if rank_key(population[0]) > rank_key(best):
            best = population[0]
            stagnant = 0
        else:
            stagnant += 1
        history.append(model.to_score(fitness[best]).ccv)
        if stagnant >= params.convergence_patience:
            converged = True
            break

    wall = time.perf_counter() - t0
    return SolveReport(
        "genetic",
        model.selection(ones(best)),
        model.to_score(fitness[best]),
        evaluations=hotspot_evals + model.evaluations - start_evals,
        wall_time=wall,
        extras={
            "generations": generations,
            "converged": converged,
            "seeded_from_hotspot": n_seeded,
            "reduced_fleet_size": len(pool),
            "hotspot_evaluations": hotspot_evals,
            "fitness_evaluations": model.evaluations - start_evals,
            "initial_best": model.selection(ones(initial_best)),
            "initial_best_ccv": model.to_score(fitness[initial_best]).ccv,
            "best_ccv_history": history,
            "final_population_ccv": [model.to_score(fitness[c]).ccv for c in population],
        },
        warnings=warnings,
    )
