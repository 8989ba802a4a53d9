from .exhaustive import DEFAULT_BUDGET, solve_exhaustive
from .genetic import GaParams, solve_genetic
from .greedy import solve_greedy
from .hotspot import solve_hotspot
from .random_baseline import solve_random
from .report import SolveReport

ALGORITHMS = ("random", "exhaustive", "hotspot", "genetic", "greedy")

__all__ = [
    "ALGORITHMS",
    "DEFAULT_BUDGET",
    "GaParams",
    "SolveReport",
    "solve_exhaustive",
    "solve_genetic",
    "solve_greedy",
    "solve_hotspot",
    "solve_random",
]
