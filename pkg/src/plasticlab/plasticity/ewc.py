"""Diagonal-Fisher EWC in global, topology-masked and per-task variants."""

from __future__ import annotations

import numpy as np

from ..network import backward_from_delta, forward, loss_and_delta, pad_neurons, sigmoid


class FisherStore:
    """Fisher diagonals and parameter anchors.

    ``global`` and ``topo`` keep one accumulated tensor per parameter,
    anchored at the most recent snapshot. ``topo_pertask`` keeps one masked
    tensor and one anchor per completed task.
    """

    def __init__(self, mode: str = "global"):
        if mode not in ("global", "topo", "topo_pertask"):
            raise ValueError(f"unknown Fisher mode {mode!r}")
        self.mode = mode
        self.accumulated: dict[str, np.ndarray] = {}
        self.anchor: dict[str, np.ndarray] = {}
        self.per_task: dict[int, dict[str, np.ndarray]] = {}
        self.anchors: dict[int, dict[str, np.ndarray]] = {}

    def __len__(self):
        return len(self.anchors)

    def resize(self, n: int) -> None:
        """Zero-extend every stored tensor to ``n`` hidden neurons."""
        def pad(d):
            return {k: pad_neurons(v, k, n) for k, v in d.items()}
        self.accumulated = pad(self.accumulated)
        self.anchor = pad(self.anchor)
        self.per_task = {t: pad(d) for t, d in self.per_task.items()}
        self.anchors = {t: pad(d) for t, d in self.anchors.items()}

    def sources(self):
        """Yield ``(fisher, anchor)`` pairs that make up the penalty."""
        if self.mode == "topo_pertask":
            for t in self.per_task:
                yield self.per_task[t], self.anchors[t]
        elif self.accumulated:
            yield self.accumulated, self.anchor


def task_support(net, task: int) -> dict[str, np.ndarray]:
    """Boolean masks of the parameters that belong to ``task``."""
    m = net.masks[task]
    sup = {"W_in": np.repeat(m[:, None], net.in_dim, axis=1), "b": m.copy()}
    for t in net.head_W:
        own = t == task
        sup[f"head_W:{t}"] = np.full(net.head_W[t].shape, own)
        sup[f"head_b:{t}"] = np.full(net.head_b[t].shape, own)
        sup[f"gate:{t}"] = m.copy() if own else np.zeros(net.n_hidden, dtype=bool)
    return sup


def per_example_sq_grads(net, x_enc: np.ndarray, targets: np.ndarray, task: int, kind: str,
                         cfg=None) -> dict[str, np.ndarray]:
    """Mean over examples of squared single-example loss gradients."""
    x_enc = np.atleast_2d(x_enc)
    n = x_enc.shape[0]
    if n == 0:
        raise ValueError("empty dataset")
    tr = forward(net, x_enc, task, cfg)
    _, delta = loss_and_delta(tr.out, targets, kind)
    delta = delta * n  # per-example loss, not batch mean
    W = net.head_W[task]
    dh = delta @ W
    fac = tr.factor if tr.factor is not None else 1.0
    dpre = dh * fac * (1.0 - tr.act * tr.act)
    out = {
        "W_in": (dpre * dpre).T @ (tr.x * tr.x) / n,
        "b": np.mean(dpre * dpre, axis=0),
        f"head_W:{task}": (delta * delta).T @ (tr.h * tr.h) / n,
        f"head_b:{task}": np.mean(delta * delta, axis=0),
    }
    g = np.zeros((n, net.n_hidden))
    if tr.factor is not None:
        own = net.masks[task]
        s = sigmoid(net.gates[task][own])
        g[:, own] = dh[:, own] * tr.act[:, own] * s * (1.0 - s)
    out[f"gate:{task}"] = np.mean(g * g, axis=0)
    return out


def per_example_sq_grads_loop(net, x_enc, targets, task, kind, cfg=None):
    """Brute-force reference: one backward pass per example."""
    x_enc = np.atleast_2d(x_enc)
    targets = np.asarray(targets, dtype=float).reshape(x_enc.shape[0], -1)
    acc: dict[str, np.ndarray] = {}
    for i in range(x_enc.shape[0]):
        tr = forward(net, x_enc[i], task, cfg)
        _, delta = loss_and_delta(tr.out, targets[i:i + 1], kind)
        g = backward_from_delta(net, tr, delta)
        for k, v in g.items():
            acc[k] = acc.get(k, 0.0) + v * v
    return {k: v / x_enc.shape[0] for k, v in acc.items()}


def _padded(d: dict, net) -> dict:
    n = net.n_hidden
    params = net.params()
    out = {}
    for k, p in params.items():
        v = d.get(k)
        out[k] = np.zeros_like(p) if v is None else pad_neurons(v, k, n)
    return out


def compute_fisher(net, x_enc, targets, task: int, kind: str, store: FisherStore, cfg=None) -> FisherStore:
    """Add task ``task``'s diagonal Fisher to ``store`` and snapshot the anchor."""
    fisher = per_example_sq_grads(net, x_enc, targets, task, kind, cfg)
    fisher = _padded(fisher, net)
    if store.mode != "global":
        sup = task_support(net, task)
        fisher = {k: np.where(sup[k], v, 0.0) for k, v in fisher.items()}
    snapshot = {k: v.copy() for k, v in net.params().items()}
    store.anchors[task] = snapshot
    if store.mode == "topo_pertask":
        store.per_task[task] = fisher
    else:
        acc = _padded(store.accumulated, net)
        store.accumulated = {k: acc[k] + fisher[k] for k in fisher}
        store.anchor = snapshot
    return store


def ewc_penalty_grad(net, store: FisherStore, lam: float = 100.0) -> dict[str, np.ndarray]:
    """Gradient of ``lam/2 * sum F (theta - theta*)^2`` over every source."""
    params = net.params()
    out: dict[str, np.ndarray] = {}
    n = net.n_hidden
    for fisher, anchor in store.sources():
        for k, f in fisher.items():
            theta = params.get(k)
            if theta is None:
                continue
            a = anchor[k]
            if f.shape != theta.shape:
                f = pad_neurons(f, k, n)
                a = pad_neurons(a, k, n)
            g = lam * f * (theta - a)
            out[k] = out[k] + g if k in out else g
    return out
