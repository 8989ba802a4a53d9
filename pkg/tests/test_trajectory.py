import io
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from drivesense.errors import TrajectoryFormatError
from drivesense.geo_grid import CellIndex, cell_center
from drivesense.trajectory import (
    Ping,
    TimeSlotting,
    ingest,
    ingest_many,
    ingest_pings,
    parse_instant,
    slot_index,
    write_pings_csv,
)

from helpers import HOUR, T0, a, example_fleet, example_slotting, example_visits, pings_for, square_grid


def test_slot_index_boundaries():
    s = TimeSlotting(T0, T0 + 5 * HOUR, HOUR)
    assert s.n_slots == 5
    assert slot_index(s, T0) == 0
    assert slot_index(s, T0 + HOUR) == 1
    assert slot_index(s, T0 + HOUR - 1) == 0
    assert [slot_index(s, T0 + h * HOUR + 30) for h in range(5)] == [0, 1, 2, 3, 4]
    assert slot_index(s, T0 + 5 * HOUR) is None
    assert slot_index(s, T0 - 1) is None


def test_trailing_partial_slot():
    s = TimeSlotting(T0, T0 + 150, 60)
    assert s.n_slots == 3
    assert s.slot_bounds(2) == (T0 + 120, T0 + 150)
    assert slot_index(s, T0 + 149) == 2


@pytest.mark.parametrize("bad", [(T0, T0, 60), (T0, T0 + 60, 0), (T0 + 5, T0, 60)])
def test_bad_slotting(bad):
    with pytest.raises(ValueError):
        TimeSlotting(*bad)


def test_parse_instant_forms():
    assert parse_instant("1538485200") == T0
    assert parse_instant("2018-10-02T09:00:00-04:00") == T0
    assert parse_instant("2018-10-02T13:00:00Z") == T0
    assert parse_instant("2018-10-02T13:00:00.900+00:00") == T0
    with pytest.raises(ValueError):
        parse_instant("2018-10-02T13:00:00")


def test_three_pings_one_cell_dedupe():
    grid = square_grid(2, 2)
    s = TimeSlotting(T0, T0 + HOUR, HOUR)
    lat, lon = cell_center(grid, CellIndex(1, 0))
    pings = [Ping("x", T0 + i, lat, lon) for i in range(3)]
    sigs, stats = ingest_pings(pings, grid, s)
    assert sigs["x"].visited[0] == {CellIndex(1, 0)}
    assert stats.assigned == 3


def test_ping_at_window_end_is_out_of_window():
    grid = square_grid(2, 2)
    s = TimeSlotting(T0, T0 + HOUR, HOUR)
    lat, lon = cell_center(grid, CellIndex(0, 0))
    sigs, stats = ingest_pings([Ping("x", T0 + HOUR, lat, lon)], grid, s)
    assert stats.out_of_window == 1 and stats.assigned == 0
    assert sigs["x"].visited == (frozenset(),)


def test_example_bus1_first_slot():
    _, _, sigs, _, _ = example_fleet()
    assert sigs["bus1"].visited[0] == {a("a21"), a("a31"), a("a22")}
    assert len(sigs["bus1"].visited[0]) == 3


CSV_TEXT = """agent_id,timestamp,lat,lon
b1,{t0},{lat},{lon}
b1,{t1},{lat},{lon}
b1,not-a-time,{lat},{lon}
b2,{t0},95.0,{lon}
b2,{t0},{lat}
b2,{late},{lat},{lon}
b2,{t0},10.0,10.0

b3,{t0},{lat},{lon}
"""


def _csv(grid, iso=False):
    lat, lon = cell_center(grid, CellIndex(0, 1))
    fmt = (lambda t: f"2018-10-02T13:00:{t - T0:02d}+00:00") if iso else str
    return CSV_TEXT.format(t0=fmt(T0), t1=fmt(T0 + 1), late=str(T0 + 10 * HOUR) if not iso else "2018-10-03T00:00:00+00:00",
                           lat=lat, lon=lon)


@pytest.mark.parametrize("iso", [False, True])
def test_csv_ingest_counts(iso):
    grid = square_grid(2, 2)
    s = TimeSlotting(T0, T0 + HOUR, HOUR)
    sigs, stats = ingest(io.StringIO(_csv(grid, iso)), grid, s)
    assert stats.pings_read == 8
    assert stats.malformed == 3
    assert stats.out_of_window == 1
    assert stats.out_of_bounds == 1
    assert stats.assigned == 3
    assert stats.pings_read == stats.assigned + stats.malformed + stats.out_of_window + stats.out_of_bounds
    assert sigs["b1"].visited[0] == {CellIndex(0, 1)}
    assert sorted(sigs) == ["b1", "b2", "b3"]


def test_epoch_rows_rejected_in_iso_file():
    grid = square_grid(2, 2)
    s = TimeSlotting(T0, T0 + HOUR, HOUR)
    lat, lon = cell_center(grid, CellIndex(0, 0))
    text = f"agent_id,timestamp,lat,lon\nb1,2018-10-02T13:00:00Z,{lat},{lon}\nb1,{T0},{lat},{lon}\n"
    _, stats = ingest(io.StringIO(text), grid, s)
    assert stats.assigned == 1 and stats.malformed == 1


def test_bad_header_and_missing_file(tmp_path):
    grid = square_grid(2, 2)
    s = TimeSlotting(T0, T0 + HOUR, HOUR)
    with pytest.raises(TrajectoryFormatError):
        ingest(io.StringIO("id,time,lat,lon\n"), grid, s)
    with pytest.raises(TrajectoryFormatError):
        ingest(io.StringIO(""), grid, s)
    with pytest.raises(TrajectoryFormatError):
        ingest(tmp_path / "missing.csv", grid, s)


def test_csv_round_trip_and_multi_file(tmp_path):
    grid = square_grid(4, 4)
    s = example_slotting()
    pings = pings_for(example_visits(), grid, s)
    half = len(pings) // 2
    paths = []
    for i, chunk in enumerate([pings[:half], pings[half:]]):
        p = tmp_path / f"part{i}.csv"
        with open(p, "w", newline="") as fh:
            write_pings_csv(chunk, fh, iso=bool(i))
        paths.append(p)
    merged, stats = ingest_many(paths, grid, s)
    direct, _ = ingest_pings(pings, grid, s)
    assert merged == direct
    assert stats.assigned == len(pings)


@given(st.randoms(use_true_random=False))
def test_permutation_invariance(rnd):
    grid = square_grid(4, 4)
    s = example_slotting()
    pings = pings_for(example_visits(), grid, s)
    shuffled = list(pings)
    rnd.shuffle(shuffled)
    assert ingest_pings(shuffled, grid, s)[0] == ingest_pings(pings, grid, s)[0]


def test_adding_pings_never_shrinks():
    rng = random.Random(3)
    grid = square_grid(4, 4)
    s = example_slotting()
    pings = pings_for(example_visits(), grid, s)
    for _ in range(50):
        subset = rng.sample(pings, rng.randint(0, len(pings)))
        extra = rng.sample(pings, rng.randint(0, len(pings)))
        small, _ = ingest_pings(subset, grid, s)
        big, _ = ingest_pings(subset + extra, grid, s)
        for agent, sig in small.items():
            assert all(x <= y for x, y in zip(sig.visited, big[agent].visited))
