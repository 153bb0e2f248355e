"""Norm-preserving Hebbian writes on the input layer."""

import numpy as np


def hebbian_update(net, trace, task: int, cfg) -> None:
    """``W_in[i] += eta_h * mean_b(h_i * x)`` for unfrozen rows owned by ``task``.

    Each updated row is rescaled back to its previous Euclidean norm; rows
    with zero norm are left alone.
    """
    rows = np.flatnonzero(net.masks[task] & (net.importance < 1.0))
    if rows.size == 0:
        return
    h = trace.h[:, rows]
    if not h.any():
        return
    old = net.W_in[rows]
    norm0 = np.linalg.norm(old, axis=1)
    new = old + cfg.eta_h * (h.T @ trace.x) / trace.x.shape[0]
    norm1 = np.linalg.norm(new, axis=1)
    ok = (norm0 > 0) & (norm1 > 0)
    new[ok] *= (norm0[ok] / norm1[ok])[:, None]
    new[~ok] = old[~ok]
    net.W_in[rows] = new
