"""Report builders behind the CLI: CCV histograms, per-cell temporal coverage,
and algorithm sweeps over sensor budgets and fleet sizes."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

from .coverage import CoverageModel, Selection, decimal_str
from .geo_grid import CellIndex
from .solvers import (
    DEFAULT_BUDGET,
    GaParams,
    SolveReport,
    solve_exhaustive,
    solve_genetic,
    solve_greedy,
    solve_hotspot,
    solve_random,
)
from .solvers.exhaustive import combinations_with_values, require_budget
from .solvers.report import check_budget_k


@dataclass
class Histogram:
    edges: list  # bins + 1 Fractions
    counts: list
    total: int

    @property
    def top_bin_fraction(self) -> Fraction:
        return Fraction(self.counts[-1], self.total)

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bucket_low", "bucket_high", "selection_count"])
        for lo, hi, count in zip(self.edges, self.edges[1:], self.counts):
            w.writerow([decimal_str(lo), decimal_str(hi), count])


def ccv_histogram(model: CoverageModel, k: int, bins: int = 20, budget: int = DEFAULT_BUDGET) -> Histogram:
    """Bucket the CCV of every size-k selection into equal-width bins.

    Bins span [min, max] of the observed CCVs; the last bin is closed. When
    every selection scores the same a single bucket is returned.
    """
    if bins < 1:
        raise ValueError("bins must be positive")
    check_budget_k(model, k)
    n = len(model.agent_ids)
    require_budget(n, k, budget)
    totals = [sum(values) for _, values in combinations_with_values(model, range(n), k)]
    lo, hi = min(totals), max(totals)
    s = model.scale
    if lo == hi:
        return Histogram([Fraction(lo, s), Fraction(hi, s)], [len(totals)], len(totals))
    counts = [0] * bins
    span = hi - lo
    for t in totals:
        counts[min((t - lo) * bins // span, bins - 1)] += 1
    edges = [Fraction(lo * bins + i * span, bins * s) for i in range(bins + 1)]
    return Histogram(edges, counts, len(totals))


def cell_temporal_coverage(model: CoverageModel, selection) -> Dict[CellIndex, Fraction]:
    """Fraction of slots in which each grid cell is visited by the selection."""
    idx = model.resolve(selection)
    if not idx:
        raise ValueError("temporal coverage needs a non-empty selection")
    union = model.union(idx)
    grid = model.grid
    l = model.n_slots
    out = {}
    for pos in range(grid.n_cells):
        bit = 1 << pos
        out[grid.unflat(pos)] = Fraction(sum(1 for m in union if m & bit), l)
    return out


def grid_average(coverage: Dict[CellIndex, Fraction]) -> Fraction:
    return sum(coverage.values(), Fraction(0)) / len(coverage)


def write_temporal_csv(coverage: Dict[CellIndex, Fraction], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["row", "col", "temporal_coverage"])
    for cell in sorted(coverage):
        w.writerow([cell.row, cell.col, decimal_str(coverage[cell])])


def run_algorithm(name: str, model: CoverageModel, k: int, *, seed: int = 0,
                  ga: Optional[GaParams] = None, budget: int = DEFAULT_BUDGET) -> SolveReport:
    if name == "random":
        return solve_random(model, k, seed)
    if name == "exhaustive":
        return solve_exhaustive(model, k, budget)
    if name == "hotspot":
        return solve_hotspot(model, k, budget)
    if name == "genetic":
        return solve_genetic(model, k, ga or GaParams(rng_seed=seed), budget)
    if name == "greedy":
        return solve_greedy(model, k)
    raise ValueError(f"unknown algorithm {name!r}")


def sub_fleet(model: CoverageModel, n: int) -> CoverageModel:
    """Model restricted to the first ``n`` agents in id order."""
    if not 1 <= n <= len(model.agent_ids):
        raise ValueError(f"fleet size {n} outside 1..{len(model.agent_ids)}")
    ids = model.agent_ids[:n]
    return CoverageModel({a: model.signatures[a] for a in ids}, model.weights, model.n_slots)


SWEEP_COLUMNS = ["algorithm", "fleet_size", "sensors", "ccv", "min_slot", "evaluations", "wall_time_s", "selection"]


def sweep_rows(reports: Iterable[tuple]) -> List[list]:
    """Tabulate ``(fleet_size, sensors, SolveReport)`` triples as CSV rows."""
    rows = []
    for n, k, rep in reports:
        rows.append([
            rep.algorithm, n, k, decimal_str(rep.score.ccv), decimal_str(rep.score.min_slot),
            rep.evaluations, f"{rep.wall_time:.6f}", " ".join(rep.selection.agent_ids),
        ])
    return rows


def write_sweep_csv(rows: Sequence[list], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    w.writerows(rows)
