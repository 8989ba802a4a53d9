"""Command-line front end: ``solve``, ``histogram``, ``coverage-report``, ``synth``.

Options come from flags, then an optional ``key = value`` config file
(``--config`` or the ``DRIVESENSE_CONFIG`` environment variable), then
built-in defaults. Config keys are flag names without the leading dashes;
``-`` and ``_`` are interchangeable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import synth as synth_mod
from .coverage import CoverageModel, Selection, decimal_str
from .errors import BudgetExceededError, DriveSenseError
from .geo_grid import as_fraction, build_grid, read_weights_csv, uniform_weights
from .reports import (
    cell_temporal_coverage,
    ccv_histogram,
    grid_average,
    run_algorithm,
    sub_fleet,
    sweep_rows,
    write_sweep_csv,
    write_temporal_csv,
)
from .solvers import ALGORITHMS, DEFAULT_BUDGET, GaParams
from .trajectory import TimeSlotting, ingest_many

CONFIG_ENV = "DRIVESENSE_CONFIG"

DEFAULTS = {
    "cell_size_m": "90",
    "slot_seconds": "3600",
    "hotspot_threshold": "1",
    "seed": "0",
    "algorithm": "greedy",
    "sensors": "3",
    "budget": str(DEFAULT_BUDGET),
    "bins": "20",
    "ga_pop": "40",
    "ga_iters": "20",
    "ga_replace": "0.2",
    "ga_patience": "3",
    "agents": "20",
    "ping_interval": "5",
    "route_model": "loop",
    "waypoints": "6",
    "speed": "8",
}


class UsageError(Exception):
    pass


def read_config(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


class Options:
    """Merged view over parsed flags, config file and defaults."""

    def __init__(self, ns: argparse.Namespace, config: dict):
        self.ns = ns
        self.config = config

    def get(self, key, default=None):
        value = getattr(self.ns, key, None)
        if value is not None:
            return value
        if key in self.config:
            return self.config[key]
        return DEFAULTS.get(key, default)

    def require(self, key):
        value = self.get(key)
        if value is None:
            raise UsageError(f"missing required option --{key.replace('_', '-')}")
        return value

    def number(self, key, kind=int):
        value = self.require(key)
        try:
            return kind(value)
        except (TypeError, ValueError):
            raise UsageError(f"--{key.replace('_', '-')}: expected a number, got {value!r}") from None

    def int_list(self, key):
        value = self.require(key)
        if isinstance(value, (list, tuple)):
            value = ",".join(map(str, value))
        try:
            return [int(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"--{key.replace('_', '-')}: expected comma-separated integers, got {value!r}") from None


def _grid(opts: Options):
    raw = opts.require("grid")
    try:
        lat_min, lat_max, lon_min, lon_max = (float(v) for v in str(raw).split(","))
    except ValueError:
        raise UsageError(f"--grid: expected lat_min,lat_max,lon_min,lon_max, got {raw!r}") from None
    return build_grid(lat_min, lat_max, lon_min, lon_max, opts.number("cell_size_m", float))


def _slotting(opts: Options) -> TimeSlotting:
    try:
        return TimeSlotting.from_values(
            opts.require("window_start"), opts.require("window_end"), opts.number("slot_seconds")
        )
    except ValueError as exc:
        raise UsageError(f"bad time window: {exc}") from None


def _load_model(opts: Options):
    grid = _grid(opts)
    threshold = opts.require("hotspot_threshold")
    weights_path = opts.get("weights")
    if weights_path:
        if not Path(weights_path).is_file():
            raise UsageError(f"weights file not found: {weights_path}")
        weights = read_weights_csv(weights_path, grid, threshold)
    else:
        weights = uniform_weights(grid, threshold)
    paths = opts.require("trajectories")
    if isinstance(paths, str):
        paths = [p.strip() for p in paths.split(",") if p.strip()]
    for p in paths:
        if not Path(p).is_file():
            raise UsageError(f"trajectory file not found: {p}")
    slotting = _slotting(opts)
    signatures, stats = ingest_many(paths, grid, slotting)
    if not signatures:
        raise UsageError("no agents found in the trajectory files")
    return CoverageModel(signatures, weights, slotting.n_slots), stats


def _ga_params(opts: Options) -> GaParams:
    try:
        return GaParams(
            population_size=opts.number("ga_pop"),
            max_iterations=opts.number("ga_iters"),
            replace_fraction=as_fraction(str(opts.require("ga_replace"))),
            convergence_patience=opts.number("ga_patience"),
            rng_seed=opts.number("seed"),
        )
    except ValueError as exc:
        raise UsageError(f"bad GA parameters: {exc}") from None


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_solve(opts: Options) -> int:
    algorithm = opts.require("algorithm")
    if algorithm not in ALGORITHMS + ("all",):
        raise UsageError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS + ('all',))}")
    names = ALGORITHMS if algorithm == "all" else (algorithm,)
    model, stats = _load_model(opts)
    sensors = opts.int_list("sensors")
    fleet_sizes = opts.int_list("fleet_sizes") if opts.get("fleet_sizes") else [len(model.agent_ids)]
    seed = opts.number("seed")
    budget = opts.number("budget")
    ga = _ga_params(opts)

    runs, table = [], []
    for n in fleet_sizes:
        fleet = sub_fleet(model, n)
        for k in sensors:
            for name in names:
                try:
                    rep = run_algorithm(name, fleet, k, seed=seed, ga=ga, budget=budget)
                except BudgetExceededError as exc:
                    if algorithm != "all":
                        raise
                    runs.append({"fleet_size": n, "sensors": k, "algorithm": name,
                                 "error": str(exc), "combinations": exc.combinations})
                    continue
                except ValueError as exc:
                    raise UsageError(f"{name} with fleet {n}, k={k}: {exc}") from None
                runs.append({"fleet_size": n, "sensors": k, **rep.to_dict()})
                table.append((n, k, rep))

    doc = {
        "ingest": stats.to_dict(),
        "fleet": list(model.agent_ids),
        "n_slots": model.n_slots,
        "runs": runs,
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", opts.get("out"))
    if opts.get("table"):
        with open(opts.get("table"), "w", newline="", encoding="utf-8") as fh:
            write_sweep_csv(sweep_rows(table), fh)
    return 0


def cmd_histogram(opts: Options) -> int:
    model, _ = _load_model(opts)
    sensors = opts.int_list("sensors")
    if len(sensors) != 1:
        raise UsageError("histogram takes a single --sensors value")
    try:
        hist = ccv_histogram(model, sensors[0], opts.number("bins"), opts.number("budget"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = opts.get("out")
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            hist.write_csv(fh)
    else:
        hist.write_csv(sys.stdout)
    print(f"selections={hist.total} top_bin_fraction={decimal_str(hist.top_bin_fraction)}", file=sys.stderr)
    return 0


def cmd_coverage_report(opts: Options) -> int:
    model, _ = _load_model(opts)
    raw = opts.get("selection") or ""
    ids = [a.strip() for a in str(raw).split(",") if a.strip()]
    if not ids:
        raise UsageError("--selection must name at least one agent")
    try:
        cov = cell_temporal_coverage(model, Selection(tuple(ids)))
    except (ValueError, LookupError) as exc:
        raise UsageError(str(exc)) from None
    out = opts.get("out")
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            write_temporal_csv(cov, fh)
    else:
        write_temporal_csv(cov, sys.stdout)
    print(f"grid_average={decimal_str(grid_average(cov))}", file=sys.stderr)
    return 0


def cmd_synth(opts: Options) -> int:
    out = opts.require("out")
    try:
        cfg = synth_mod.SynthConfig(
            grid=_grid(opts),
            n_agents=opts.number("agents"),
            slotting=_slotting(opts),
            ping_interval=opts.number("ping_interval"),
            route_model=opts.require("route_model"),
            route_waypoints_per_agent=opts.number("waypoints"),
            speed_mps=opts.number("speed", float),
            rng_seed=opts.number("seed"),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    pings, _ = synth_mod.write_outputs(cfg, out, opts.get("meta"), iso=bool(opts.get("iso")))
    print(f"wrote {len(pings)} pings for {cfg.n_agents} agents to {out}", file=sys.stderr)
    return 0


def _add_common(p: argparse.ArgumentParser, data: bool = True) -> None:
    p.add_argument("--config", help=f"key = value config file (default: ${CONFIG_ENV})")
    p.add_argument("--grid", help="lat_min,lat_max,lon_min,lon_max")
    p.add_argument("--cell-size-m", dest="cell_size_m", help="cell edge in meters (default 90)")
    p.add_argument("--window-start", dest="window_start", help="ISO-8601 with offset or Unix seconds")
    p.add_argument("--window-end", dest="window_end")
    p.add_argument("--slot-seconds", dest="slot_seconds", help="slot duration (default 3600)")
    p.add_argument("--seed", help="RNG seed (default 0)")
    p.add_argument("--out", help="output path (default stdout)")
    if data:
        p.add_argument("--weights", help="CSV with row,col,weight or lat,lon,weight")
        p.add_argument("--trajectories", nargs="+", help="trajectory CSV file(s)")
        p.add_argument("--hotspot-threshold", dest="hotspot_threshold", help="default 1")
        p.add_argument("--budget", help=f"exhaustive evaluation budget (default {DEFAULT_BUDGET})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drivesense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="select agents with one or all algorithms")
    _add_common(p)
    p.add_argument("--algorithm", help=f"one of {', '.join(ALGORITHMS)}, or all")
    p.add_argument("--sensors", help="sensor budget k, or comma-separated list")
    p.add_argument("--fleet-sizes", dest="fleet_sizes", help="comma-separated fleet sizes (first n agents)")
    p.add_argument("--table", help="also write a CSV summary table here")
    p.add_argument("--ga-pop", dest="ga_pop")
    p.add_argument("--ga-iters", dest="ga_iters")
    p.add_argument("--ga-replace", dest="ga_replace")
    p.add_argument("--ga-patience", dest="ga_patience")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("histogram", help="CCV distribution over all size-k selections")
    _add_common(p)
    p.add_argument("--sensors")
    p.add_argument("--bins")
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("coverage-report", help="per-cell temporal coverage of a selection")
    _add_common(p)
    p.add_argument("--selection", help="comma-separated agent ids")
    p.set_defaults(func=cmd_coverage_report)

    p = sub.add_parser("synth", help="generate a synthetic fleet trajectory CSV")
    _add_common(p, data=False)
    p.add_argument("--agents")
    p.add_argument("--ping-interval", dest="ping_interval")
    p.add_argument("--route-model", dest="route_model", help="loop or back_and_forth")
    p.add_argument("--waypoints")
    p.add_argument("--speed", help="meters per second (default 8)")
    p.add_argument("--meta", help="route metadata JSON path")
    p.add_argument("--iso", action="store_true", default=None, help="ISO-8601 timestamps")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        config_path = ns.config or os.environ.get(CONFIG_ENV)
        config = read_config(config_path) if config_path else {}
        return ns.func(Options(ns, config))
    except (UsageError, OSError) as exc:
        print(f"drivesense {ns.command}: error: {exc}", file=sys.stderr)
        return 2
    except DriveSenseError as exc:
        print(f"drivesense {ns.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
