"""A small end-to-end experiment: run a few configurations through the
resumable matrix, aggregate, and rank them."""

import sys
import tempfile

from plasticlab import pareto
from plasticlab.runner import matrix

out = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="plasticlab_")
budget = {"max_epochs": 300, "patience": 60}
configs = ["full_mpcs", "mpcs_efficient", "no_adaptive_growth", "baseline_minimal"]

done = matrix.run_matrix(configs, ["B_MIXED"], (0,), out, budget)
print(f"ran {len(done)} cells into {out} (rerunning skips finished cells)")

table = matrix.aggregate(matrix.load_results(out))
report = matrix.write_aggregate_csv(table, f"{out}/aggregate.csv")
print(pareto.format_table(report))
