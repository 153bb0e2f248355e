"""Perf, representation diversity, gradient conflict rate and gate pass rate."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from .network import CLASSIFICATION, REGRESSION, backward, forward
from .plasticity.importance import apply_freeze_scaling

PASS_THRESHOLD = 0.5


def r2_score(pred, target) -> float:
    """Coefficient of determination, clipped to [0, 1]."""
    pred = np.asarray(pred, dtype=float).ravel()
    target = np.asarray(target, dtype=float).ravel()
    sse = float(np.sum((target - pred) ** 2))
    sst = float(np.sum((target - target.mean()) ** 2))
    if sst == 0.0:
        return 1.0 if sse == 0.0 else 0.0
    return float(np.clip(1.0 - sse / sst, 0.0, 1.0))


def perf_task(predictions, targets, kind: str) -> float:
    """R^2 for regression, accuracy at logit 0 (probability 0.5) for classification."""
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.size != targets.size:
        raise ValueError(f"length mismatch: {predictions.size} predictions, {targets.size} targets")
    if predictions.size == 0:
        raise ValueError("empty test set")
    if kind == REGRESSION:
        return r2_score(predictions, targets)
    if kind == CLASSIFICATION:
        return float(np.mean((predictions.ravel() > 0.0) == (targets.ravel() > 0.5)))
    raise ValueError(f"unknown task kind {kind!r}")


def gate_pass_rate(perfs, threshold: float = PASS_THRESHOLD) -> float:
    perfs = np.asarray(perfs, dtype=float)
    if perfs.size == 0:
        raise ValueError("need at least one task")
    return float(np.mean(perfs >= threshold))


def _cos(a, b):
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return None
    return float(np.dot(a, b) / (na * nb))


def diversity_from_means(means) -> float:
    """Mean pairwise ``clamp(1 - cos, 0, 1)``; zero-norm pairs count as 1."""
    means = list(means)
    if len(means) < 2:
        raise ValueError("need at least two tasks")
    vals = []
    for a, b in combinations(means, 2):
        c = _cos(a, b)
        vals.append(1.0 if c is None else min(max(1.0 - c, 0.0), 1.0))
    return float(np.mean(vals))


def representation_diversity(net, tasks, cfg=None) -> float:
    """``tasks`` is a sequence of ``(task_id, x_enc_test)``."""
    means = [forward(net, x, t, cfg).h.mean(axis=0) for t, x in tasks]
    return diversity_from_means(means)


def conflict_fraction(ga: np.ndarray, gb: np.ndarray) -> float:
    both = (ga != 0) & (gb != 0)
    n = int(both.sum())
    if n == 0:
        return 0.0
    return float(np.sum(np.sign(ga[both]) != np.sign(gb[both])) / n)


def conflict_rate_from_grads(grads) -> float:
    """Percentage of sign disagreements, averaged over task pairs."""
    grads = [np.ravel(g) for g in grads]
    if len(grads) < 2:
        raise ValueError("need at least two tasks")
    return 100.0 * float(np.mean([conflict_fraction(a, b) for a, b in combinations(grads, 2)]))


def shared_neurons(net) -> np.ndarray:
    """Indices of unowned neurons and neurons read by another task via routing.

    Falls back to every neuron when none qualify.
    """
    shared = ~net.owned()
    for r in net.readable.values():
        shared |= r
    idx = np.flatnonzero(shared)
    return idx if idx.size else np.arange(net.n_hidden)


def gradient_conflict_rate(net, tasks, cfg=None) -> float:
    """Sign-conflict percentage of per-task gradients on shared input weights.

    ``tasks`` is a sequence of ``(task_id, x_enc_test, y_test, kind)``. The
    gradients compared are the ones training would apply: rows of frozen
    neurons are zeroed first, so a frozen weight can never be in conflict.
    """
    rows = shared_neurons(net)
    continuous = bool(cfg is not None and cfg.use_continuous_importance)
    grads = []
    for t, x, y, kind in tasks:
        tr = forward(net, x, t, cfg)
        _, g = backward(net, tr, y, kind)
        g = apply_freeze_scaling(g, net.importance, continuous)
        grads.append(np.concatenate([g["W_in"][rows].ravel(), g["b"][rows]]))
    return conflict_rate_from_grads(grads)


@dataclass
class MetricRecord:
    config: str
    seed: int
    track: str
    perf_per_task: list = field(default_factory=list)
    Perf: float = 0.0
    RD: float = 0.0
    GCR: float = 0.0
    gate_pass_rate: float = 0.0
    wall_ms: float = 0.0
    growth_events: int = 0
    epochs_per_task: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)
