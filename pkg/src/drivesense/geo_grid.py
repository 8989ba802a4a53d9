"""Square-cell grid over a geographic bounding box, plus per-cell weights.

Coordinates are converted to meters with an equirectangular approximation
anchored at the box's south-west corner. Row 0 is the southernmost band and
column 0 the westernmost, so ``CellIndex(row, col)`` grows north and east.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .errors import InvalidRegionError, WeightEntryError

METERS_PER_DEG_LAT = 111_320.0

# Extents overshooting a whole number of cells by less than this fraction of a
# cell are folded into the last row/col instead of opening a sliver cell.
SLIVER_TOLERANCE = 0.01


class CellIndex(NamedTuple):
    row: int
    col: int


class GeoPoint(NamedTuple):
    lat: float
    lon: float


@dataclass(frozen=True)
class GridSpec:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float
    cell_size_m: float
    rows: int
    cols: int

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    @property
    def meters_per_deg_lon(self) -> float:
        mid = math.radians((self.lat_min + self.lat_max) / 2.0)
        return METERS_PER_DEG_LAT * math.cos(mid)

    @property
    def cell_height_deg(self) -> float:
        return self.cell_size_m / METERS_PER_DEG_LAT

    @property
    def cell_width_deg(self) -> float:
        return self.cell_size_m / self.meters_per_deg_lon

    def flat(self, cell: CellIndex) -> int:
        """Row-major position of ``cell``; the bit index used by coverage masks."""
        return cell.row * self.cols + cell.col

    def unflat(self, pos: int) -> CellIndex:
        return CellIndex(*divmod(pos, self.cols))

    def cells(self):
        for r in range(self.rows):
            for c in range(self.cols):
                yield CellIndex(r, c)


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (via its repr)."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def _count_cells(extent_m: float, cell_size_m: float) -> int:
    return max(1, math.ceil(extent_m / cell_size_m - SLIVER_TOLERANCE))


def build_grid(lat_min, lat_max, lon_min, lon_max, cell_size_m) -> GridSpec:
    """Discretize a bounding box into square cells of ``cell_size_m`` meters.

    ``rows`` is the north-south extent divided by the cell size, rounded up;
    ``cols`` does the same for the east-west extent measured at mid-latitude.
    """
    values = [lat_min, lat_max, lon_min, lon_max, cell_size_m]
    if not all(math.isfinite(float(v)) for v in values):
        raise InvalidRegionError("grid bounds and cell size must be finite numbers")
    if cell_size_m <= 0:
        raise InvalidRegionError(f"cell size must be positive, got {cell_size_m}")
    if not lat_min < lat_max:
        raise InvalidRegionError(f"empty latitude extent [{lat_min}, {lat_max}]")
    if not lon_min < lon_max:
        raise InvalidRegionError(f"empty longitude extent [{lon_min}, {lon_max}]")
    if lat_min < -90 or lat_max > 90 or lon_min < -180 or lon_max > 180:
        raise InvalidRegionError("bounding box lies outside WGS84 coordinate ranges")

    mid = math.radians((lat_min + lat_max) / 2.0)
    ns_m = (lat_max - lat_min) * METERS_PER_DEG_LAT
    ew_m = (lon_max - lon_min) * METERS_PER_DEG_LAT * math.cos(mid)
    return GridSpec(
        float(lat_min), float(lat_max), float(lon_min), float(lon_max),
        float(cell_size_m),
        rows=_count_cells(ns_m, cell_size_m),
        cols=_count_cells(ew_m, cell_size_m),
    )


def locate(grid: GridSpec, lat: float, lon: float) -> Optional[CellIndex]:
    """Return the cell containing ``(lat, lon)``, or ``None`` outside the box.

    Cells are half-open ``[south, north) x [west, east)``; points on the far
    north or east edge of the box are clamped into the last row or column.
    """
    if not (grid.lat_min <= lat <= grid.lat_max and grid.lon_min <= lon <= grid.lon_max):
        return None
    row = int((lat - grid.lat_min) * METERS_PER_DEG_LAT // grid.cell_size_m)
    col = int((lon - grid.lon_min) * grid.meters_per_deg_lon // grid.cell_size_m)
    return CellIndex(min(row, grid.rows - 1), min(col, grid.cols - 1))


def cell_bounds(grid: GridSpec, cell: CellIndex):
    """(south, north, west, east) of ``cell`` clipped to the bounding box.

    The last row/col absorbs any sliver, so its northern/eastern edge is the
    box edge itself.
    """
    _check_cell(grid, cell)
    south = grid.lat_min + cell.row * grid.cell_height_deg
    west = grid.lon_min + cell.col * grid.cell_width_deg
    north = grid.lat_min + (cell.row + 1) * grid.cell_height_deg
    east = grid.lon_min + (cell.col + 1) * grid.cell_width_deg
    if cell.row == grid.rows - 1:
        north = grid.lat_max
    if cell.col == grid.cols - 1:
        east = grid.lon_max
    return south, min(north, grid.lat_max), west, min(east, grid.lon_max)


def cell_center(grid: GridSpec, cell: CellIndex) -> GeoPoint:
    south, north, west, east = cell_bounds(grid, cell)
    return GeoPoint((south + north) / 2.0, (west + east) / 2.0)


def _check_cell(grid: GridSpec, cell: CellIndex) -> None:
    if not (0 <= cell.row < grid.rows and 0 <= cell.col < grid.cols):
        raise IndexError(f"{cell} outside a {grid.rows}x{grid.cols} grid")


@dataclass(frozen=True)
class WeightGrid:
    """Per-cell importance weights. Cells strictly above the threshold are hotspots."""

    grid: GridSpec
    weights: tuple  # rows x cols tuple of tuples of Fraction
    hotspot_threshold: Fraction = Fraction(1)

    def weight(self, cell: CellIndex) -> Fraction:
        return self.weights[cell.row][cell.col]

    @property
    def hotspots(self) -> frozenset:
        return frozenset(
            CellIndex(r, c)
            for r, row in enumerate(self.weights)
            for c, w in enumerate(row)
            if w > self.hotspot_threshold
        )

    def masked(self) -> "WeightGrid":
        """Copy with every non-hotspot cell set to weight 0."""
        thr = self.hotspot_threshold
        weights = tuple(
            tuple(w if w > thr else Fraction(0) for w in row) for row in self.weights
        )
        return WeightGrid(self.grid, weights, thr)


WeightEntry = tuple  # (CellIndex | GeoPoint, weight)


def uniform_weights(grid: GridSpec, hotspot_threshold=1) -> WeightGrid:
    return load_weights(grid, [], hotspot_threshold)


def load_weights(
    grid: GridSpec,
    entries: Iterable[WeightEntry],
    hotspot_threshold: Union[Fraction, int, str] = 1,
) -> WeightGrid:
    """Build a weight grid where listed cells override the default weight of 1.

    Entries are ``(CellIndex, weight)`` or ``(GeoPoint, weight)``; points are
    resolved through :func:`locate`. Later entries for the same cell win.
    """
    table = [[Fraction(1)] * grid.cols for _ in range(grid.rows)]
    for i, (where, weight) in enumerate(entries):
        try:
            w = as_fraction(weight)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise WeightEntryError(i, f"unparseable weight {weight!r}") from exc
        if w < 0:
            raise WeightEntryError(i, f"negative weight {weight}")
        if isinstance(where, GeoPoint):
            cell = locate(grid, where.lat, where.lon)
            if cell is None:
                raise WeightEntryError(i, f"point {tuple(where)} outside the grid")
        elif isinstance(where, CellIndex):
            cell = where
            if not (0 <= cell.row < grid.rows and 0 <= cell.col < grid.cols):
                raise WeightEntryError(i, f"{tuple(cell)} outside a {grid.rows}x{grid.cols} grid")
        else:
            raise WeightEntryError(i, f"expected CellIndex or GeoPoint, got {type(where).__name__}")
        table[cell.row][cell.col] = w
    return WeightGrid(grid, tuple(tuple(r) for r in table), as_fraction(hotspot_threshold))


def read_weights_csv(path, grid: GridSpec, hotspot_threshold=1) -> WeightGrid:
    """Load a ``row,col,weight`` or ``lat,lon,weight`` CSV file."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
        if header == ["row", "col", "weight"]:
            as_cell = True
        elif header == ["lat", "lon", "weight"]:
            as_cell = False
        else:
            raise WeightEntryError(0, f"bad header {header!r}; expected row,col,weight or lat,lon,weight")
        entries = []
        for i, rec in enumerate(r for r in reader if r and any(f.strip() for f in r)):
            if len(rec) != 3:
                raise WeightEntryError(i, f"expected 3 fields, got {len(rec)}")
            a, b, w = (f.strip() for f in rec)
            try:
                where = CellIndex(int(a), int(b)) if as_cell else GeoPoint(float(a), float(b))
            except ValueError as exc:
                raise WeightEntryError(i, f"bad coordinates {a!r}, {b!r}") from exc
            entries.append((where, w))
    return load_weights(grid, entries, hotspot_threshold)


def weights_from_matrix(grid: GridSpec, matrix: Sequence[Sequence], hotspot_threshold=1) -> WeightGrid:
    """Weight grid from a full rows x cols matrix indexed ``[row][col]``."""
    if len(matrix) != grid.rows or any(len(r) != grid.cols for r in matrix):
        raise WeightEntryError(0, f"matrix shape does not match {grid.rows}x{grid.cols} grid")
    entries = [
        (CellIndex(r, c), w) for r, row in enumerate(matrix) for c, w in enumerate(row)
    ]
    return load_weights(grid, entries, hotspot_threshold)
