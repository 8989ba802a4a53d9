"""Exhaustive enumeration of every size-k selection."""

from __future__ import annotations

import heapq
import time
from math import comb
from typing import Iterator, Sequence, Tuple

from ..coverage import CoverageModel
from ..errors import BudgetExceededError
from .report import SolveReport, check_budget_k

DEFAULT_BUDGET = 10**7


def combinations_with_values(model: CoverageModel, pool: Sequence[int], k: int) -> Iterator[Tuple[tuple, tuple]]:
    """Yield ``(indices, scaled slot values)`` for every k-subset of ``pool``.

    Subsets come out in lexicographic order of the sorted pool. Prefix unions
    are shared down the recursion so each leaf costs one OR per slot.
    """
    pool = sorted(pool)
    n = len(pool)
    masks = model.masks
    value = model.value
    combo = []

    def rec(start, depth, union):
        if depth == k:
            model.evaluations += 1
            yield tuple(combo), tuple(value(m) for m in union)
            return
        for pos in range(start, n - (k - depth) + 1):
            i = pool[pos]
            combo.append(i)
            yield from rec(pos + 1, depth + 1, tuple(a | b for a, b in zip(union, masks[i])))
            combo.pop()

    if 0 <= k <= n:
        yield from rec(0, 0, (0,) * model.n_slots)


def require_budget(n: int, k: int, budget: int) -> int:
    count = comb(n, k)
    if count > budget:
        raise BudgetExceededError(count, budget)
    return count


def best_combination(model: CoverageModel, pool: Sequence[int], k: int):
    """Compare-maximal k-subset of ``pool`` under ``model``'s weights.

    Lexicographic enumeration means the first subset reaching a given
    (total, min-slot) pair already has the smallest sorted ids, so later ties
    never replace it.
    """
    best = None
    best_key = None
    for combo, values in combinations_with_values(model, pool, k):
        key = (sum(values), min(values))
        if best_key is None or key > best_key:
            best, best_key = (combo, values), key
    return best


def top_combinations(model: CoverageModel, pool: Sequence[int], k: int, count: int):
    """The ``count`` best k-subsets of ``pool`` in descending compare order."""
    scored = (
        ((sum(values), min(values), -seq), combo)
        for seq, (combo, values) in enumerate(combinations_with_values(model, pool, k))
    )
    return [combo for _, combo in heapq.nlargest(count, scored)]


def solve_exhaustive(model: CoverageModel, k: int, budget: int = DEFAULT_BUDGET) -> SolveReport:
    """Evaluate all C(n, k) selections and return the compare-maximal one."""
    check_budget_k(model, k)
    n = len(model.agent_ids)
    require_budget(n, k, budget)
    start_evals = model.evaluations
    t0 = time.perf_counter()
    combo, values = best_combination(model, range(n), k)
    wall = time.perf_counter() - t0
    return SolveReport(
        "exhaustive",
        model.selection(combo),
        model.to_score(values),
        evaluations=model.evaluations - start_evals,
        wall_time=wall,
        extras={"combinations": comb(n, k)},
    )
