"""Post-task synapse pruning with stochastic regeneration."""

from dataclasses import dataclass

import numpy as np


@dataclass
class PruneReport:
    task: int
    pruned: int
    regenerated: int


def prune_and_regenerate(net, task: int, cfg, rng: np.random.Generator) -> PruneReport:
    """Zero input weights below ``tau_p`` in the task's rows, then regrow some.

    Each pruned synapse is redrawn from ``Normal(0, regen_std^2)`` with
    probability ``p_r``. Frozen rows are never touched.
    """
    rows = np.flatnonzero(net.masks[task] & (net.importance < 1.0))
    if rows.size == 0:
        return PruneReport(task, 0, 0)
    block = net.W_in[rows]
    small = np.abs(block) < cfg.tau_p
    n_pruned = int(small.sum())
    block[small] = 0.0
    regen = small & (rng.random(block.shape) < cfg.p_r)
    n_regen = int(regen.sum())
    block[regen] = rng.normal(0.0, cfg.regen_std, size=n_regen)
    net.W_in[rows] = block
    return PruneReport(task, n_pruned, n_regen)
