"""Hotspot-restricted exhaustive search.

Non-hotspot cells are zeroed, agents that never enter a hotspot are dropped,
and the remaining fleet is searched exhaustively on the masked grid. The
winner is then re-scored on the full grid so it sits on the same axis as the
other solvers.
"""

from __future__ import annotations

import time
from math import comb

from ..coverage import CoverageModel
from .exhaustive import DEFAULT_BUDGET, best_combination, require_budget
from .report import SolveReport, check_budget_k, zero_score


def hotspot_fleet(model: CoverageModel):
    """Masked-weight model and the sorted indices of agents touching a hotspot."""
    masked = model.with_weights(model.weights.masked())
    hot = 0
    for cell in model.weights.hotspots:
        hot |= 1 << model.grid.flat(cell)
    pool = [i for i, masks in enumerate(model.masks) if any(m & hot for m in masks)]
    return masked, pool


def solve_hotspot(model: CoverageModel, k: int, budget: int = DEFAULT_BUDGET) -> SolveReport:
    check_budget_k(model, k)
    start_evals = model.evaluations
    t0 = time.perf_counter()
    masked, pool = hotspot_fleet(model)
    size = min(k, len(pool))
    warnings = []
    if size < k:
        warnings.append(
            f"only {len(pool)} agents touch a hotspot; returning a selection of size {size} < {k}"
        )
    extras = {
        "hotspot_cells": len(model.weights.hotspots),
        "reduced_fleet_size": len(pool),
        "combinations": comb(len(pool), size),
    }
    if size == 0:
        wall = time.perf_counter() - t0
        extras["masked_score"] = zero_score(model)
        return SolveReport("hotspot", model.selection(()), zero_score(model), 0, wall, extras, warnings)

    require_budget(len(pool), size, budget)
    combo, masked_values = best_combination(masked, pool, size)
    full = model.to_score(tuple(model.value(m) for m in model.union(combo)))
    wall = time.perf_counter() - t0
    extras["masked_score"] = masked.to_score(masked_values)
    return SolveReport(
        "hotspot", model.selection(combo), full,
        evaluations=masked.evaluations + model.evaluations - start_evals,
        wall_time=wall, extras=extras, warnings=warnings,
    )
