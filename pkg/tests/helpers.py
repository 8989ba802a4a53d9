"""Fixtures shared by the test modules.

The worked example is a 4x4 grid, unit weights, three one-hour slots. Cells
are written ``aIJ`` with I the matrix row counted from the top and J the
column, both 1-based, and mapped to ``CellIndex(4 - I, J - 1)``.

Slot 1 routes: bus1 passes a21, a31, a22; bus2 four
cells; bus3 five cells; a22 and a32 are each covered twice, so the union of
{bus1, bus2, bus3} is 10 cells out of 12 visits. Slots 2 and 3 give unions of
12 and 9 cells.
"""

import itertools
import math
import random
from fractions import Fraction

from drivesense.geo_grid import METERS_PER_DEG_LAT, CellIndex, build_grid, cell_center, load_weights
from drivesense.trajectory import Ping, TimeSlotting, ingest_pings

T0 = 1538485200  # 2018-10-02 13:00 UTC
HOUR = 3600


def square_grid(rows, cols, cell=90.0, lat0=33.95, lon0=-83.40):
    lat1 = lat0 + rows * cell / METERS_PER_DEG_LAT
    mid = math.radians((lat0 + lat1) / 2)
    lon1 = lon0 + cols * cell / (METERS_PER_DEG_LAT * math.cos(mid))
    grid = build_grid(lat0, lat1, lon0, lon1, cell)
    assert (grid.rows, grid.cols) == (rows, cols)
    return grid


def a(name):
    i, j = int(name[1]), int(name[2])
    return CellIndex(4 - i, j - 1)


EXAMPLE_ROUTES = {
    "bus1": [["a21", "a31", "a22"], ["a11", "a12", "a13", "a14"], ["a11", "a21"]],
    "bus2": [["a32", "a33", "a34", "a24"], ["a44", "a43", "a42", "a41"], ["a31", "a41", "a42"]],
    "bus3": [["a12", "a22", "a32", "a42", "a43"], ["a23", "a33", "a24", "a34"], ["a13", "a23", "a33", "a44", "a42"]],
    "bus4": [["a11", "a12", "a13"], ["a31", "a32"], ["a14", "a24", "a34", "a44"]],
    "bus5": [["a44", "a34"], ["a21", "a22", "a23", "a24"], ["a41"]],
}


def example_visits():
    return {bus: [{a(c) for c in slot} for slot in slots] for bus, slots in EXAMPLE_ROUTES.items()}


def example_slotting(n_slots=3):
    return TimeSlotting(T0, T0 + n_slots * HOUR, HOUR)


def pings_for(visits, grid, slotting, repeat=2, rng=None):
    """Pings at cell centers, ``repeat`` per visit, spread inside each slot.

    Agents without any visit get one ping just past the window so they still
    appear in the fleet.
    """
    out = []
    for agent, slots in visits.items():
        if not any(slots):
            lat, lon = cell_center(grid, CellIndex(0, 0))
            out.append(Ping(agent, slotting.window_end, lat, lon))
        for k, cells in enumerate(slots):
            lo, hi = slotting.slot_bounds(k)
            for n, cell in enumerate(sorted(cells)):
                for r in range(repeat):
                    t = lo + (n * repeat + r) % (hi - lo)
                    lat, lon = cell_center(grid, cell)
                    out.append(Ping(agent, t, lat, lon))
    if rng is not None:
        rng.shuffle(out)
    return out


def example_fleet(weights_entries=()):
    grid = square_grid(4, 4)
    slotting = example_slotting()
    sigs, stats = ingest_pings(pings_for(example_visits(), grid, slotting), grid, slotting)
    weights = load_weights(grid, list(weights_entries))
    return grid, slotting, sigs, weights, stats


# Hotspot-weighted variant of the example grid (arbitrary weights 2..8).
EXAMPLE_WEIGHTS = [(a("a22"), 4), (a("a33"), 2), (a("a14"), 8), (a("a41"), Fraction(5, 2))]


WEIGHT_CHOICES = [Fraction(0), Fraction(1), Fraction(1), Fraction(1), Fraction(2), Fraction(3),
                  Fraction(5, 2), Fraction(8)]


def random_instance(rng, n, rows, cols, n_slots, weighted=True, density=0.25):
    """Random cell-level visits plus the matching grid, slotting and weights."""
    grid = square_grid(rows, cols)
    slotting = TimeSlotting(T0, T0 + n_slots * HOUR, HOUR)
    cells = [CellIndex(r, c) for r in range(rows) for c in range(cols)]
    visits = {}
    for i in range(n):
        slots = []
        for _ in range(n_slots):
            m = rng.randint(0, max(1, int(density * len(cells))))
            slots.append(set(rng.sample(cells, m)))
        visits[f"b{i:02d}"] = slots
    weight_map = {c: (rng.choice(WEIGHT_CHOICES) if weighted else Fraction(1)) for c in cells}
    weights = load_weights(grid, [(c, w) for c, w in weight_map.items()])
    return grid, slotting, visits, weight_map, weights


def oracle_slot_values(visits, weight_map, selection, n_slots):
    values = []
    for k in range(n_slots):
        union = set()
        for agent in selection:
            union |= visits[agent][k]
        values.append(sum((weight_map[c] for c in union), Fraction(0)))
    return values


def oracle_best(visits, weight_map, k, n_slots):
    """Brute-force compare-maximal selection using plain Python sets."""
    best = None
    for combo in itertools.combinations(sorted(visits), k):
        vals = oracle_slot_values(visits, weight_map, combo, n_slots)
        key = (sum(vals), min(vals))
        if best is None or key > best[0] or (key == best[0] and combo < best[1]):
            best = (key, combo, vals)
    return best


def hotspot_instance(rng, n=8, touching=5, rows=6, cols=6, n_slots=3):
    """Instance where exactly ``touching`` of ``n`` agents ever enter a hotspot.

    Hotspots are three cells with weights 2..8; the other agents only visit
    non-hotspot cells.
    """
    grid = square_grid(rows, cols)
    slotting = TimeSlotting(T0, T0 + n_slots * HOUR, HOUR)
    cells = [CellIndex(r, c) for r in range(rows) for c in range(cols)]
    hot = rng.sample(cells, 3)
    plain = [c for c in cells if c not in hot]
    weight_map = {c: Fraction(1) for c in cells}
    for c in hot:
        weight_map[c] = Fraction(rng.randint(2, 8))
    visits = {}
    for i in range(n):
        slots = [set(rng.sample(plain, rng.randint(2, 12))) for _ in range(n_slots)]
        if i < touching:
            slots[rng.randrange(n_slots)].add(rng.choice(hot))
        visits[f"b{i:02d}"] = slots
    weights = load_weights(grid, [(c, w) for c, w in weight_map.items() if w != 1])
    return grid, slotting, visits, weight_map, weights


def model_for(visits, grid, slotting, weights):
    from drivesense.coverage import CoverageModel

    sigs, _ = ingest_pings(pings_for(visits, grid, slotting), grid, slotting)
    return CoverageModel(sigs, weights, slotting.n_slots)
