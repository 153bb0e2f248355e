"""Task-similarity routing over stored input statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


@dataclass
class RoutingDecision:
    similar_task: int | None
    similarity: float
    reuse: bool


def route_by_similarity(buffer, new_mean: np.ndarray, cfg) -> RoutingDecision:
    """Find the stored task whose mean encoded input is closest in cosine.

    Reuse is signalled when that similarity reaches ``s_thresh``.
    """
    best_t, best_s = None, 0.0
    for t, summary in buffer.tasks.items():
        s = cosine(new_mean, summary.mean)
        if best_t is None or s > best_s:
            best_t, best_s = t, s
    if best_t is None:
        return RoutingDecision(None, 0.0, False)
    return RoutingDecision(best_t, best_s, best_s >= cfg.s_thresh)
