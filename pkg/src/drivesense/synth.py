"""Seeded synthetic fleet: agents cycling fixed straight-segment routes.

Each agent gets waypoints drawn uniformly inside the grid's bounding box and
drives them at constant speed, either as a closed loop or out and back,
starting from a random phase. Pings are emitted every ``ping_interval``
seconds across the whole time window.
"""

from __future__ import annotations

import bisect
import json
import math
import random
from dataclasses import dataclass
from typing import List

from .geo_grid import METERS_PER_DEG_LAT, GridSpec
from .trajectory import Ping, TimeSlotting, write_pings_csv

ROUTE_MODELS = ("loop", "back_and_forth")
_PRECISION = 7
# keeps rounded coordinates strictly inside the box
_MARGIN_DEG = 1e-6


@dataclass(frozen=True)
class SynthConfig:
    grid: GridSpec
    n_agents: int
    slotting: TimeSlotting
    ping_interval: int = 5
    route_model: str = "loop"
    route_waypoints_per_agent: int = 6
    speed_mps: float = 8.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("n_agents must be at least 1")
        if self.ping_interval <= 0:
            raise ValueError("ping_interval must be positive")
        if self.speed_mps <= 0:
            raise ValueError("speed_mps must be positive")
        if self.route_waypoints_per_agent < 1:
            raise ValueError("route_waypoints_per_agent must be at least 1")
        if self.route_model not in ROUTE_MODELS:
            raise ValueError(f"route_model must be one of {ROUTE_MODELS}, got {self.route_model!r}")


@dataclass(frozen=True)
class Route:
    agent_id: str
    route_model: str
    waypoints: tuple  # (lat, lon) pairs
    path: tuple  # waypoints in driving order, closed back to the start
    cumulative_m: tuple
    speed_mps: float
    phase_m: float

    @property
    def length_m(self) -> float:
        return self.cumulative_m[-1]

    @property
    def period_s(self) -> float:
        return self.length_m / self.speed_mps

    def position(self, elapsed_s: float):
        """(lat, lon) after driving ``elapsed_s`` seconds from the start phase."""
        if self.length_m == 0:
            return self.path[0]
        d = (self.phase_m + self.speed_mps * elapsed_s) % self.length_m
        seg = min(bisect.bisect_right(self.cumulative_m, d) - 1, len(self.path) - 2)
        lo, hi = self.cumulative_m[seg], self.cumulative_m[seg + 1]
        frac = 0.0 if hi == lo else (d - lo) / (hi - lo)
        (lat0, lon0), (lat1, lon1) = self.path[seg], self.path[seg + 1]
        return lat0 + frac * (lat1 - lat0), lon0 + frac * (lon1 - lon0)

    def metadata(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "route_model": self.route_model,
            "waypoints": [list(w) for w in self.waypoints],
            "length_m": round(self.length_m, 3),
            "period_s": round(self.period_s, 3),
            "phase_m": round(self.phase_m, 3),
        }


def _make_route(agent_id: str, cfg: SynthConfig, rng: random.Random) -> Route:
    g = cfg.grid
    lat_lo, lat_hi = g.lat_min + _MARGIN_DEG, g.lat_max - _MARGIN_DEG
    lon_lo, lon_hi = g.lon_min + _MARGIN_DEG, g.lon_max - _MARGIN_DEG
    if lat_lo > lat_hi:
        lat_lo = lat_hi = (g.lat_min + g.lat_max) / 2
    if lon_lo > lon_hi:
        lon_lo = lon_hi = (g.lon_min + g.lon_max) / 2
    waypoints = tuple(
        (round(rng.uniform(lat_lo, lat_hi), _PRECISION), round(rng.uniform(lon_lo, lon_hi), _PRECISION))
        for _ in range(cfg.route_waypoints_per_agent)
    )
    if cfg.route_model == "loop":
        path = waypoints + waypoints[:1]
    else:
        path = waypoints + waypoints[-2::-1] if len(waypoints) > 1 else waypoints + waypoints
    m_lon = g.meters_per_deg_lon
    cumulative = [0.0]
    for (a_lat, a_lon), (b_lat, b_lon) in zip(path, path[1:]):
        dy = (b_lat - a_lat) * METERS_PER_DEG_LAT
        dx = (b_lon - a_lon) * m_lon
        cumulative.append(cumulative[-1] + math.hypot(dx, dy))
    phase = rng.random() * cumulative[-1]
    return Route(agent_id, cfg.route_model, waypoints, path, tuple(cumulative), cfg.speed_mps, phase)


def agent_name(i: int, n_agents: int) -> str:
    return f"bus{i + 1:0{max(2, len(str(n_agents)))}d}"


def generate(cfg: SynthConfig):
    """Return ``(pings, routes)``; identical configs give identical output.

    Pings are ordered by agent, then time. Coordinates are rounded to seven
    decimals, the precision written to CSV.
    """
    rng = random.Random(cfg.rng_seed)
    routes: List[Route] = [_make_route(agent_name(i, cfg.n_agents), cfg, rng) for i in range(cfg.n_agents)]
    ws, we = cfg.slotting.window_start, cfg.slotting.window_end
    pings = []
    for route in routes:
        for t in range(ws, we, cfg.ping_interval):
            lat, lon = route.position(t - ws)
            pings.append(Ping(route.agent_id, t, round(lat, _PRECISION), round(lon, _PRECISION)))
    return pings, routes


def write_outputs(cfg: SynthConfig, csv_path, meta_path=None, iso: bool = False):
    """Write the trajectory CSV and, optionally, the route JSON sidecar."""
    pings, routes = generate(cfg)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        write_pings_csv(pings, fh, iso=iso, precision=_PRECISION)
    if meta_path is not None:
        meta = {
            "rng_seed": cfg.rng_seed,
            "ping_interval": cfg.ping_interval,
            "speed_mps": cfg.speed_mps,
            "agents": [r.metadata() for r in routes],
        }
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return pings, routes
