"""Choose which fleet vehicles carry sensors to maximize weighted spatio-temporal coverage."""

from .coverage import CoverageModel, Score, Selection, ccv, compare, slot_coverage
from .geo_grid import CellIndex, GeoPoint, GridSpec, WeightGrid, build_grid, load_weights, locate
from .solvers import (
    GaParams,
    SolveReport,
    solve_exhaustive,
    solve_genetic,
    solve_greedy,
    solve_hotspot,
    solve_random,
)
from .trajectory import CoverageSignature, IngestStats, Ping, TimeSlotting, ingest, slot_index

__version__ = "0.1.0"
