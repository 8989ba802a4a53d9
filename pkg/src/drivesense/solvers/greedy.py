"""Greedy redundancy minimization.

Keeps a residual weight for every (cell, slot) pair. Each step picks the
agent whose visits collect the most residual weight, then zeroes every pair
that agent covers, so later picks are only paid for what is still uncovered.
"""

from __future__ import annotations

import time
from fractions import Fraction

from ..coverage import CoverageModel
from .report import SolveReport, check_budget_k


def solve_greedy(model: CoverageModel, k: int) -> SolveReport:
    check_budget_k(model, k)
    start_evals = model.evaluations
    t0 = time.perf_counter()
    n = len(model.agent_ids)
    covered = [0] * model.n_slots
    remaining = list(range(n))
    picks, steps = [], []

    for _ in range(k):
        step = {}
        for i in remaining:
            step[i] = sum(model.value(m & ~c) for m, c in zip(model.masks[i], covered))
        model.evaluations += len(remaining)
        # max() keeps the first maximum, i.e. the lowest id among ties
        pick = max(remaining, key=lambda i: step[i])
        covered = [c | m for c, m in zip(covered, model.masks[pick])]
        remaining.remove(pick)
        picks.append(pick)
        steps.append(step)

    values = [model.value(c) for c in covered]
    wall = time.perf_counter() - t0
    ids = model.agent_ids
    return SolveReport(
        "greedy", model.selection(picks), model.to_score(values),
        evaluations=model.evaluations - start_evals, wall_time=wall,
        extras={
            "pick_order": [model.agent_ids[i] for i in picks],
            "marginal_gains": [Fraction(step[i], model.scale) for i, step in zip(picks, steps)],
            "candidate_gains": [
                {ids[i]: Fraction(g, model.scale) for i, g in step.items()} for step in steps
            ],
        },
    )
