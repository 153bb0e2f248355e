"""Gate filtering, Pareto dominance and NES scoring over ablation results.

Objectives: Perf is maximised, RD and GCR are minimised.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

GATE_THRESHOLD = 0.75
NES_MARGIN = 0.05


@dataclass
class SystemPoint:
    name: str
    perf: float
    rd: float | None
    gcr: float | None
    gate_pass_rate: float | None = None  # None: unpublished, assumed passing
    time_min: float | None = None
    sigma: float | None = None
    status: str | None = None  # published status, when known
    partial: bool = False  # missing result cells

    def passes_gate(self, threshold: float = GATE_THRESHOLD) -> bool:
        if self.partial or self.rd is None or self.gcr is None:
            return False
        return self.gate_pass_rate is None or self.gate_pass_rate >= threshold

    def objectives(self) -> tuple:
        return (self.perf, self.rd, self.gcr)


def dominates(a: SystemPoint, b: SystemPoint) -> bool:
    """``a`` is no worse on every objective and strictly better on one."""
    no_worse = a.perf >= b.perf and a.rd <= b.rd and a.gcr <= b.gcr
    better = a.perf > b.perf or a.rd < b.rd or a.gcr < b.gcr
    return no_worse and better


@dataclass
class ParetoReport:
    included: list
    excluded: list
    edges: list  # (dominator, dominated)
    frontier: list
    nes: dict
    bounds: dict
    points: dict = field(default_factory=dict)
    discrepancies: list = field(default_factory=list)

    @property
    def dominated(self) -> list:
        return [n for n in self.included if n not in self.frontier]

    def dominators(self, name: str) -> list:
        return [a for a, b in self.edges if b == name]

    def status(self, name: str) -> str:
        if name in self.excluded:
            return "excluded"
        if name in self.frontier:
            return "frontier"
        return "dominated(" + ";".join(self.dominators(name)) + ")"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["edges"] = [list(e) for e in self.edges]
        d["dominated"] = self.dominated
        d["status"] = {n: self.status(n) for n in self.points}
        return d

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))


def nes_scores(points, margin: float = NES_MARGIN):
    """Normalised dominated-box volume per system, in [0, 100].

    Each objective is min-max normalised over ``points`` with the worst end
    pushed out by ``margin`` of the observed range, so every quality is
    strictly positive. Returns ``(scores, bounds)``.
    """
    points = list(points)
    if not points:
        return {}, {}
    obj = np.array([p.objectives() for p in points], dtype=float)
    sense = np.array([1.0, -1.0, -1.0])  # maximise Perf, minimise RD and GCR
    oriented = obj * sense
    best = oriented.max(axis=0)
    worst = oriented.min(axis=0)
    span = best - worst
    ref = worst - margin * span
    denom = best - ref
    q = np.ones_like(oriented)
    ok = denom > 0
    q[:, ok] = (oriented[:, ok] - ref[ok]) / denom[ok]
    scores = {p.name: float(100.0 * np.prod(q[i])) for i, p in enumerate(points)}
    bounds = {
        k: {"best": float(best[j] * sense[j]), "reference": float(ref[j] * sense[j])}
        for j, k in enumerate(("Perf", "RD", "GCR"))
    }
    return scores, bounds


def nes(points) -> dict:
    return nes_scores(points)[0]


def frontier(points, gate_threshold: float = GATE_THRESHOLD) -> ParetoReport:
    points = list(points)
    included = [p for p in points if p.passes_gate(gate_threshold)]
    excluded = [p.name for p in points if not p.passes_gate(gate_threshold)]
    edges = [(a.name, b.name) for a in included for b in included if a is not b and dominates(a, b)]
    dominated = {b for _, b in edges}
    front = [p.name for p in included if p.name not in dominated]
    scores, bounds = nes_scores(included)
    report = ParetoReport(
        included=[p.name for p in included], excluded=excluded, edges=edges,
        frontier=front, nes=scores, bounds=bounds, points={p.name: p for p in points},
    )
    report.discrepancies = compare_published(report)
    for msg in report.discrepancies:
        log.warning(msg)
    return report


def parse_status(status: str):
    """``('frontier'|'dominated'|'excluded', [dominators])`` from a status cell."""
    status = (status or "").strip()
    if status.startswith("dominated"):
        inner = status[status.find("(") + 1:status.rfind(")")]
        return "dominated", [s for s in inner.split(";") if s]
    return status, []


def compare_published(report: ParetoReport) -> list:
    """Messages for every system whose published status disagrees with ours."""
    out = []
    for name, p in report.points.items():
        if not p.status:
            continue
        want, want_dom = parse_status(p.status)
        got, got_dom = parse_status(report.status(name))
        if want != got or (want == "dominated" and sorted(want_dom) != sorted(got_dom)):
            out.append(f"{name}: published status {p.status!r} but computed {report.status(name)!r}")
    return out


def _num(s):
    s = (s or "").strip()
    return float(s) if s else None


def load_points(path) -> list:
    """Read an aggregate CSV (``config, Perf, sigma, RD, GCR, NES, time_min, status[, gate_pass_rate]``)."""
    points = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            status = (row.get("status") or "").strip() or None
            gate = _num(row.get("gate_pass_rate"))
            if gate is None and status == "excluded":
                gate = 0.0
            points.append(SystemPoint(
                name=row["config"], perf=float(row["Perf"]), rd=_num(row.get("RD")),
                gcr=_num(row.get("GCR")), gate_pass_rate=gate, time_min=_num(row.get("time_min")),
                sigma=_num(row.get("sigma")), status=status,
                partial=(row.get("partial") or "").strip().lower() in ("1", "true", "yes"),
            ))
    return points


def table1_path():
    return resources.files("plasticlab") / "data" / "table1.csv"


def load_table1() -> list:
    """Published ablation numbers, one :class:`SystemPoint` per configuration."""
    with resources.as_file(table1_path()) as p:
        return load_points(p)


def efficiency_analysis(report: ParetoReport, configs: dict, base: str = "full_mpcs",
                        perf_tolerance: float = 0.0) -> dict:
    """Components whose removal is dominated yet costs no Perf, removed jointly.

    ``configs`` maps configuration name to its flag dict. A single-ablation
    is a configuration that switches exactly one of the base's flags off. Its
    component is dispensable when the ablation is Pareto-dominated and its
    Perf is within ``perf_tolerance`` of the base (or better).
    """
    if base not in configs:
        raise KeyError(f"base configuration {base!r} missing")
    base_flags = configs[base]
    base_perf = report.points[base].perf if base in report.points else None

    def is_off(v):
        return v is False or v == "off"

    singles = {}
    for name, flags in configs.items():
        diff = [k for k in base_flags if flags.get(k) != base_flags[k]]
        if len(diff) == 1 and is_off(flags[diff[0]]) and not is_off(base_flags[diff[0]]):
            singles[name] = diff[0]
    dispensable = []
    for name, flag in singles.items():
        if name not in report.included or name in report.frontier:
            continue
        perf = report.points[name].perf
        if base_perf is not None and perf < base_perf - perf_tolerance:
            continue
        dispensable.append((name, flag))
    recommended = None
    if dispensable:
        recommended = dict(base_flags)
        for _, flag in dispensable:
            recommended[flag] = "off" if isinstance(base_flags[flag], str) else False
    return {
        "single_ablations": singles,
        "dispensable": [flag for _, flag in dispensable],
        "from_configs": [name for name, _ in dispensable],
        "recommended_flags": recommended,
    }


STATUS_SYMBOL = {"frontier": "✓", "excluded": "×"}


def format_table(report: ParetoReport) -> str:
    """Plain-text table: Configuration, Perf, sigma, RD, GCR, NES, Time, Status."""
    def f(v, fmt):
        return "-" if v is None else format(v, fmt)

    lines = [f"{'Configuration':<24}{'Perf':>8}{'sigma':>7}{'RD':>9}{'GCR':>8}{'NES':>7}{'Time':>8}  Status"]
    lines.append("-" * len(lines[0]) + "-" * 12)
    for name, p in report.points.items():
        kind, doms = parse_status(report.status(name))
        status = STATUS_SYMBOL.get(kind) or "○ (" + ", ".join(doms) + ")"
        lines.append(
            f"{name:<24}{p.perf:>8.4f}{f(p.sigma, '.3f'):>7}{f(p.rd, '.5f'):>9}{f(p.gcr, '.2f'):>8}"
            f"{f(report.nes.get(name), '.1f'):>7}{f(p.time_min, '.1f'):>8}  {status}"
        )
    if report.discrepancies:
        lines.append("")
        lines.extend("note: " + m for m in report.discrepancies)
    return "\n".join(lines)
