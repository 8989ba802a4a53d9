"""GPS ping ingestion and per-slot coverage signatures.

Trajectory CSV files carry the header ``agent_id,timestamp,lat,lon``. The
timestamp column is either integer Unix seconds or ISO-8601 with a UTC
offset; which one is decided from the first data row of each file.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from typing import Dict, Iterable, Iterator, NamedTuple, Optional, Tuple

from .errors import TrajectoryFormatError
from .geo_grid import CellIndex, GridSpec, locate

HEADER = ["agent_id", "timestamp", "lat", "lon"]
_EPOCH_RE = re.compile(r"^[+-]?\d+$")


class Ping(NamedTuple):
    agent_id: str
    timestamp: int  # Unix seconds, UTC
    lat: float
    lon: float


def parse_instant(value) -> int:
    """Unix seconds from an int, an aware datetime, or an epoch/ISO-8601 string.

    ISO strings must carry a UTC offset (``Z`` is accepted). Sub-second parts
    are truncated toward the earlier second.
    """
    if isinstance(value, bool):
        raise ValueError("boolean is not an instant")
    if isinstance(value, int):
        return value
    if isinstance(value, datetime):
        if value.tzinfo is None:
            raise ValueError(f"naive datetime {value!r}; an offset is required")
        return math.floor(value.timestamp())
    text = str(value).strip()
    if _EPOCH_RE.match(text):
        return int(text)
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {value!r} has no UTC offset")
    return math.floor(dt.timestamp())


def format_instant(t: int) -> str:
    return datetime.fromtimestamp(t, tz=timezone.utc).isoformat()


@dataclass(frozen=True)
class TimeSlotting:
    """Half-open window ``[window_start, window_end)`` cut into equal slots.

    The final slot is shorter when the duration does not divide the window.
    """

    window_start: int
    window_end: int
    slot_duration: int

    def __post_init__(self):
        if self.slot_duration <= 0:
            raise ValueError(f"slot duration must be positive, got {self.slot_duration}")
        if self.window_end <= self.window_start:
            raise ValueError("window end must be after window start")

    @classmethod
    def from_values(cls, start, end, slot_seconds) -> "TimeSlotting":
        return cls(parse_instant(start), parse_instant(end), int(slot_seconds))

    @property
    def n_slots(self) -> int:
        return -(-(self.window_end - self.window_start) // self.slot_duration)

    def slot_bounds(self, k: int) -> Tuple[int, int]:
        lo = self.window_start + k * self.slot_duration
        return lo, min(lo + self.slot_duration, self.window_end)


def slot_index(slotting: TimeSlotting, t: int) -> Optional[int]:
    """Slot containing instant ``t``, or ``None`` outside the window."""
    if not slotting.window_start <= t < slotting.window_end:
        return None
    return (t - slotting.window_start) // slotting.slot_duration


@dataclass(frozen=True)
class CoverageSignature:
    agent_id: str
    visited: tuple  # one frozenset of CellIndex per slot

    @property
    def n_slots(self) -> int:
        return len(self.visited)

    def cells(self) -> frozenset:
        return frozenset().union(*self.visited)


@dataclass
class IngestStats:
    pings_read: int = 0
    assigned: int = 0
    out_of_bounds: int = 0
    out_of_window: int = 0
    malformed: int = 0

    def __iadd__(self, other: "IngestStats"):
        for key, value in asdict(other).items():
            setattr(self, key, getattr(self, key) + value)
        return self

    def to_dict(self) -> dict:
        return asdict(self)


def _valid_coords(lat: float, lon: float) -> bool:
    return -90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0


def parse_rows(lines: Iterable[str]) -> Iterator[Optional[Ping]]:
    """Yield a :class:`Ping` per data line, or ``None`` for a malformed line.

    Raises :class:`TrajectoryFormatError` when the header is wrong.
    """
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None:
        raise TrajectoryFormatError("trajectory source is empty; expected header agent_id,timestamp,lat,lon")
    if [h.strip().lower() for h in header] != HEADER:
        raise TrajectoryFormatError(f"bad trajectory header {header!r}; expected {','.join(HEADER)}")

    epoch_mode = None
    for rec in reader:
        if not rec or not any(field.strip() for field in rec):
            continue
        if epoch_mode is None and len(rec) >= 2:
            epoch_mode = bool(_EPOCH_RE.match(rec[1].strip()))
        if len(rec) != 4:
            yield None
            continue
        agent_id, ts, lat, lon = (field.strip() for field in rec)
        try:
            if not agent_id:
                raise ValueError("empty agent id")
            if epoch_mode:
                if not _EPOCH_RE.match(ts):
                    raise ValueError("not an epoch timestamp")
                t = int(ts)
            else:
                if _EPOCH_RE.match(ts):
                    raise ValueError("epoch timestamp in an ISO file")
                t = parse_instant(ts)
            lat_f, lon_f = float(lat), float(lon)
            if not _valid_coords(lat_f, lon_f):
                raise ValueError("coordinates out of range")
        except (ValueError, OverflowError, OSError):
            yield None
            continue
        yield Ping(agent_id, t, lat_f, lon_f)


class _Collector:
    def __init__(self, grid: GridSpec, slotting: TimeSlotting):
        self.grid = grid
        self.slotting = slotting
        self.stats = IngestStats()
        self.visits: Dict[str, list] = {}

    def add(self, ping: Optional[Ping]) -> None:
        st = self.stats
        st.pings_read += 1
        if ping is None or not _valid_coords(ping.lat, ping.lon):
            st.malformed += 1
            return
        slots = self.visits.setdefault(ping.agent_id, [set() for _ in range(self.slotting.n_slots)])
        k = slot_index(self.slotting, ping.timestamp)
        if k is None:
            st.out_of_window += 1
            return
        cell = locate(self.grid, ping.lat, ping.lon)
        if cell is None:
            st.out_of_bounds += 1
            return
        slots[k].add(cell)
        st.assigned += 1

    def signatures(self) -> Dict[str, CoverageSignature]:
        return {
            agent: CoverageSignature(agent, tuple(frozenset(s) for s in slots))
            for agent, slots in sorted(self.visits.items())
        }


def ingest_pings(pings: Iterable[Optional[Ping]], grid: GridSpec, slotting: TimeSlotting):
    """Compile coverage signatures from already-parsed pings.

    ``None`` items count as malformed records. Every agent with at least one
    well-formed ping gets a signature, even if none of its pings land in the
    window or grid.
    """
    col = _Collector(grid, slotting)
    for ping in pings:
        col.add(ping)
    return col.signatures(), col.stats


def _open_lines(source):
    if isinstance(source, (str, os.PathLike)):
        try:
            return open(source, newline="", encoding="utf-8")
        except OSError as exc:
            raise TrajectoryFormatError(f"cannot read trajectory file {source}: {exc}") from exc
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return source
    return iter(source)


def ingest(source, grid: GridSpec, slotting: TimeSlotting):
    """Read a trajectory CSV (path, open file, or iterable of lines).

    Returns ``(signatures, stats)`` with signatures keyed and ordered by
    agent id. Malformed data lines are skipped and counted; a missing file
    or wrong header raises :class:`TrajectoryFormatError`.
    """
    return ingest_many([source], grid, slotting)


def ingest_many(sources, grid: GridSpec, slotting: TimeSlotting):
    """Like :func:`ingest` over several files; visits of the same agent are merged."""
    col = _Collector(grid, slotting)
    for source in sources:
        lines = _open_lines(source)
        try:
            for ping in parse_rows(lines):
                col.add(ping)
        except UnicodeDecodeError as exc:
            raise TrajectoryFormatError(f"trajectory source is not UTF-8: {exc}") from exc
        finally:
            if lines is not source and hasattr(lines, "close"):
                lines.close()
    return col.signatures(), col.stats


def write_pings_csv(pings: Iterable[Ping], fh, iso: bool = False, precision: int = 7) -> None:
    """Write pings in the trajectory CSV format with fixed coordinate precision."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(HEADER)
    for p in pings:
        ts = format_instant(p.timestamp) if iso else str(p.timestamp)
        w.writerow([p.agent_id, ts, f"{p.lat:.{precision}f}", f"{p.lon:.{precision}f}"])


def signature_from_cells(agent_id: str, per_slot: Iterable[Iterable[Tuple[int, int]]]) -> CoverageSignature:
    """Build a signature directly from per-slot ``(row, col)`` pairs."""
    return CoverageSignature(
        agent_id, tuple(frozenset(CellIndex(*c) for c in cells) for cells in per_slot)
    )
