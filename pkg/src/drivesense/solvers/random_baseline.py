from __future__ import annotations

import random
import time

from ..coverage import CoverageModel
from .report import SolveReport, check_budget_k


def solve_random(model: CoverageModel, k: int, rng_seed: int = 0) -> SolveReport:
    """Uniformly random k-subset of the fleet, scored once."""
    check_budget_k(model, k)
    start_evals = model.evaluations
    t0 = time.perf_counter()
    rng = random.Random(rng_seed)
    picked = sorted(rng.sample(range(len(model.agent_ids)), k))
    score = model.to_score(model.slot_values(picked))
    wall = time.perf_counter() - t0
    return SolveReport(
        "random", model.selection(picked), score,
        evaluations=model.evaluations - start_evals, wall_time=wall,
        extras={"rng_seed": rng_seed},
    )
