"""Experiment matrix: (config, seed, track) cells, result files, aggregation."""

from __future__ import annotations

import csv
import json
import logging
import os
import tempfile
import traceback
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path

import numpy as np

from .. import __version__, pareto
from ..benchgen import TRACK_IDS, TRACKS
from .registry import get_config
from .training import PRESETS, run_track

log = logging.getLogger(__name__)

AGGREGATE_COLUMNS = ["config", "Perf", "sigma", "RD", "GCR", "NES", "time_min", "status",
                     "gate_pass_rate", "partial", "n_cells"]


def cell_filename(config: str, seed: int, track: str) -> str:
    return f"{config}__{track}__s{seed}.json"


def atomic_write_json(path, obj) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(obj, fh, indent=1)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_cell(config: str, seed: int, track: str, preset="desk", cfg=None) -> dict:
    """Run one cell and return its self-contained result record.

    ``preset`` is a preset name or an explicit ``{"max_epochs", "patience"}`` dict.
    """
    cfg = get_config(config) if cfg is None else cfg
    budget = PRESETS[preset] if isinstance(preset, str) else dict(preset)
    record = {
        "config": config, "seed": int(seed), "track": track, "benchmark_seed": int(seed),
        "preset": preset, "code_version": __version__, "config_hash": cfg.config_hash(),
        "mechanisms": cfg.to_dict(),
    }
    try:
        r = run_track(cfg, track, seed, budget["max_epochs"], budget["patience"])
    except Exception as exc:  # recorded, the matrix carries on
        record.update(status="failed", error=f"{type(exc).__name__}: {exc}",
                      traceback=traceback.format_exc())
        return record
    state = r.pop("state")
    record.update(
        status="ok",
        perf_per_task=r["perf_per_task"], Perf=r["Perf"], RD=r["RD"], GCR=r["GCR"],
        gate_pass_rate=r["gate_pass_rate"], wall_ms=r["wall_ms"],
        events=r["events"], epochs_per_task=r["epochs_per_task"], n_hidden=r["n_hidden"],
        mean_similarity=r["mean_similarity"], log=state.log,
    )
    return record


def _run_and_write(args):
    config, seed, track, preset, out_dir = args
    rec = run_cell(config, seed, track, preset)
    atomic_write_json(Path(out_dir) / cell_filename(config, seed, track), rec)
    return config, seed, track, rec["status"]


def run_matrix(configs, tracks=TRACK_IDS, seeds=(0, 1, 2), out_dir="results", preset="desk",
               workers: int = 1) -> list:
    """Run every missing cell; completed cells on disk are skipped.

    Returns the list of ``(config, seed, track, status)`` for cells executed
    in this call.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    todo = []
    for config, track, seed in product(configs, tracks, seeds):
        if track not in TRACKS:
            raise KeyError(f"unknown track {track!r}")
        get_config(config)
        path = out / cell_filename(config, seed, track)
        if path.exists():
            try:
                if json.loads(path.read_text()).get("status") == "ok":
                    continue
            except json.JSONDecodeError:
                pass
        todo.append((config, seed, track, preset, str(out)))
    done = []
    if workers <= 1:
        for args in todo:
            done.append(_run_and_write(args))
            log.info("finished %s %s seed=%d: %s", done[-1][0], done[-1][2], done[-1][1], done[-1][3])
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_run_and_write, todo):
                done.append(res)
                log.info("finished %s %s seed=%d: %s", res[0], res[2], res[1], res[3])
    return done


def load_results(in_dir) -> list:
    results = []
    for p in sorted(Path(in_dir).glob("*.json")):
        rec = json.loads(p.read_text())
        if "config" in rec and "track" in rec:
            results.append(rec)
    return results


def aggregate(results) -> dict:
    """Per-configuration summary: track-mean per seed, then mean over seeds.

    ``sigma`` is the population standard deviation of the per-seed Perf,
    ``time_min`` the total wall time, and the gate rate is task-weighted.
    Configurations with missing or failed cells are marked partial.
    """
    ok = [r for r in results if r.get("status", "ok") == "ok"]
    all_seeds = sorted({r["seed"] for r in results})
    all_tracks = sorted({r["track"] for r in results})
    by_cfg: dict = {}
    for r in ok:
        by_cfg.setdefault(r["config"], []).append(r)
    configs = list(dict.fromkeys(r["config"] for r in results))
    table = {}
    for name in configs:
        recs = by_cfg.get(name, [])
        cells = {(r["seed"], r["track"]) for r in recs}
        partial = len(cells) < len(all_seeds) * len(all_tracks)
        if not recs:
            table[name] = {"config": name, "partial": True, "n_cells": 0}
            continue
        per_seed = {}
        for r in recs:
            per_seed.setdefault(r["seed"], []).append(r)
        seed_means = {k: [] for k in ("Perf", "RD", "GCR")}
        for s in sorted(per_seed):
            for k in seed_means:
                seed_means[k].append(float(np.mean([r[k] for r in per_seed[s]])))
        passes = sum(sum(p >= 0.5 for p in r["perf_per_task"]) for r in recs)
        n_tasks = sum(len(r["perf_per_task"]) for r in recs)
        table[name] = {
            "config": name,
            "Perf": float(np.mean(seed_means["Perf"])),
            "sigma": float(np.std(seed_means["Perf"])),
            "RD": float(np.mean(seed_means["RD"])),
            "GCR": float(np.mean(seed_means["GCR"])),
            "time_min": sum(r["wall_ms"] for r in recs) / 60000.0,
            "gate_pass_rate": passes / n_tasks,
            "partial": partial,
            "n_cells": len(recs),
        }
    return table


def to_points(table: dict) -> list:
    pts = []
    for name, row in table.items():
        if "Perf" not in row:
            continue
        pts.append(pareto.SystemPoint(
            name=name, perf=row["Perf"], rd=row["RD"], gcr=row["GCR"],
            gate_pass_rate=row["gate_pass_rate"], time_min=row["time_min"], sigma=row["sigma"],
            partial=row["partial"],
        ))
    return pts


def write_aggregate_csv(table: dict, path) -> pareto.ParetoReport:
    """Write the aggregate table (with NES and status filled in) and return the report."""
    report = pareto.frontier(to_points(table))
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=AGGREGATE_COLUMNS)
        w.writeheader()
        for name, row in table.items():
            if "Perf" not in row:
                continue
            out = {k: row.get(k, "") for k in AGGREGATE_COLUMNS}
            out["NES"] = report.nes.get(name, "")
            out["status"] = report.status(name)
            out["partial"] = str(bool(row["partial"])).lower()
            w.writerow(out)
    return report
