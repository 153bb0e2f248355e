"""Activity-driven neuron importance and the freeze rule."""

import numpy as np


def update_importance(importance: np.ndarray, h: np.ndarray, alpha: float = 0.01,
                      tau: float = 1e-4) -> np.ndarray:
    """EMA of the firing indicator ``|h_i| > tau``; frozen entries (>= 1) are kept.

    ``h`` may be a single activation vector or a batch, in which case the
    indicator is averaged over the batch. Returns a new array.
    """
    importance = np.asarray(importance, dtype=float)
    h = np.asarray(h, dtype=float)
    if h.shape[-1] != importance.shape[0]:
        raise ValueError(f"activation width {h.shape[-1]} != importance length {importance.shape[0]}")
    active = np.abs(h) > tau
    if active.ndim > 1:
        active = active.mean(axis=0)
    updated = (1.0 - alpha) * importance + alpha * active
    return np.where(importance >= 1.0, importance, updated)


def apply_freeze_scaling(grads: dict, importance: np.ndarray, continuous: bool) -> dict:
    """Mask input-layer gradients per neuron; mutates and returns ``grads``.

    Rows of frozen neurons (importance >= 1) are zeroed whatever ``continuous``
    says. Otherwise, with ``continuous`` on, rows are scaled by ``1 - nu``.
    Heads and gates are not touched.
    """
    frozen = importance >= 1.0
    if continuous:
        scale = np.where(frozen, 0.0, 1.0 - importance)
        grads["W_in"] = grads["W_in"] * scale[:, None]
        grads["b"] = grads["b"] * scale
    elif frozen.any():
        keep = ~frozen
        grads["W_in"] = grads["W_in"] * keep[:, None]
        grads["b"] = grads["b"] * keep
    return grads


def freeze_task(net, task: int) -> None:
    """Raise importance of every neuron owned by ``task`` to at least 1."""
    if task not in net.masks:
        raise KeyError(f"unknown task {task}")
    m = net.masks[task]
    net.importance[m] = np.maximum(net.importance[m], 1.0)
