"""Multi-objective comparison of the published ablation results: gating,
dominance, NES and which mechanisms can be dropped."""

from plasticlab import pareto
from plasticlab.runner.registry import REGISTRY

report = pareto.frontier(pareto.load_table1())
print(pareto.format_table(report))
print()
print("frontier:", ", ".join(report.frontier))
print("excluded by the gate:", ", ".join(report.excluded))

eff = pareto.efficiency_analysis(report, {n: c.flags for n, c in REGISTRY.items()})
print("dispensable mechanisms:", eff["dispensable"])
off = [k for k, v in eff["recommended_flags"].items() if v in (False, "off")]
print("recommended configuration turns off:", off)
