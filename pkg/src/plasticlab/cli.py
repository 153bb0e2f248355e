"""Command-line entry point: gen, run, aggregate, pareto, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import benchgen, pareto
from .runner import matrix
from .runner.registry import CONFIG_NAMES, REGISTRY
from .runner.training import PRESETS


def _tracks(value: str) -> list:
    if value == "all":
        return list(benchgen.TRACK_IDS)
    tracks = [t.strip() for t in value.split(",") if t.strip()]
    unknown = [t for t in tracks if t not in benchgen.TRACKS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown track(s) {unknown}; expected {benchgen.TRACK_IDS}")
    return tracks


def _configs(value: str) -> list:
    if value == "all":
        return list(CONFIG_NAMES)
    names = [c.strip() for c in value.split(",") if c.strip()]
    unknown = [c for c in names if c not in REGISTRY]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown configuration(s) {unknown}")
    return names


def cmd_gen(args) -> int:
    paths = benchgen.write_tracks(args.out, seed=args.seed, tracks=args.tracks)
    print(f"wrote {len(paths)} task files to {args.out}")
    return 0


def cmd_run(args) -> int:
    seeds = list(range(args.seed_offset, args.seed_offset + args.seeds))
    done = matrix.run_matrix(args.config, args.tracks, seeds, args.out, args.preset, args.workers)
    failed = [d for d in done if d[3] != "ok"]
    print(f"ran {len(done)} cells ({len(failed)} failed) into {args.out}")
    for c, s, t, _ in failed:
        print(f"  failed: {c} {t} seed={s}")
    return 1 if failed else 0


def cmd_aggregate(args) -> int:
    results = matrix.load_results(args.inp)
    if not results:
        print(f"no result files in {args.inp}", file=sys.stderr)
        return 1
    table = matrix.aggregate(results)
    matrix.write_aggregate_csv(table, args.out)
    partial = [n for n, r in table.items() if r["partial"]]
    print(f"aggregated {len(results)} results over {len(table)} configurations into {args.out}")
    if partial:
        print("partial (excluded from Pareto input): " + ", ".join(partial))
    return 0


def cmd_pareto(args) -> int:
    report = pareto.frontier(pareto.load_points(args.inp), gate_threshold=args.gate)
    report.to_json(args.report)
    print(pareto.format_table(report))
    return 0


def cmd_report(args) -> int:
    data = json.loads(Path(args.inp).read_text())
    points = [pareto.SystemPoint(**p) for p in data["points"].values()]
    report = pareto.ParetoReport(
        included=data["included"], excluded=data["excluded"],
        edges=[tuple(e) for e in data["edges"]], frontier=data["frontier"], nes=data["nes"],
        bounds=data["bounds"], points={p.name: p for p in points},
        discrepancies=data.get("discrepancies", []),
    )
    print(pareto.format_table(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plasticlab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write benchmark datasets as text files")
    g.add_argument("--tracks", type=_tracks, default=list(benchgen.TRACK_IDS))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run the experiment matrix (resumable)")
    r.add_argument("--config", type=_configs, default=list(CONFIG_NAMES))
    r.add_argument("--seeds", type=int, default=3, help="number of seeds, counted from --seed-offset")
    r.add_argument("--seed-offset", type=int, default=0)
    r.add_argument("--tracks", type=_tracks, default=list(benchgen.TRACK_IDS))
    r.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    r.add_argument("--out", required=True)
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("aggregate", help="aggregate result files into a table")
    a.add_argument("--in", dest="inp", required=True)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_aggregate)

    q = sub.add_parser("pareto", help="gate, frontier and NES from an aggregate table")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--report", required=True)
    q.add_argument("--gate", type=float, default=pareto.GATE_THRESHOLD)
    q.set_defaults(func=cmd_pareto)

    t = sub.add_parser("report", help="print a saved Pareto report as a table")
    t.add_argument("--in", dest="inp", required=True)
    t.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
