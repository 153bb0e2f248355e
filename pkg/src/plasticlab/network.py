"""Growable single-hidden-layer network with manual forward/backward passes.

Parameters are addressed by string keys so gradient sets, Fisher tensors,
anchors and optimizer moments can all be plain ``dict[str, ndarray]``:

``"W_in"`` (N, 2K), ``"b"`` (N,), ``"head_W:t"`` (d_out, N), ``"head_b:t"``
(d_out,), ``"gate:t"`` (N,).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import substream

REGRESSION = "regression"
CLASSIFICATION = "classification"


def neuron_axis(key: str):
    """Axis of ``key`` that runs over hidden neurons, or None."""
    if key in ("W_in", "b") or key.startswith("gate:"):
        return 0
    if key.startswith("head_W:"):
        return 1
    return None


def pad_neurons(arr: np.ndarray, key: str, n: int) -> np.ndarray:
    """Zero-extend ``arr`` along its neuron axis to length ``n``."""
    ax = neuron_axis(key)
    if ax is None or arr.shape[ax] == n:
        return arr
    width = [(0, 0)] * arr.ndim
    width[ax] = (0, n - arr.shape[ax])
    return np.pad(arr, width)


class FourierEncoder:
    """Random Fourier features ``[sin(P x), cos(P x)]`` with a fixed projection."""

    def __init__(self, d: int = 8, k: int = 32, sigma: float = 2.0, seed: int = 0,
                 projection: np.ndarray | None = None):
        self.d = int(d)
        self.k = int(k)
        self.sigma = float(sigma)
        self.seed = int(seed)
        if projection is None:
            projection = substream(seed, "encoder").normal(0.0, sigma, size=(k, d))
        projection = np.array(projection, dtype=float)
        if projection.shape != (self.k, self.d):
            raise ValueError(f"projection shape {projection.shape} != {(self.k, self.d)}")
        projection.setflags(write=False)
        self.projection = projection

    @property
    def out_dim(self) -> int:
        return 2 * self.k

    def __call__(self, x):
        return fourier_encode(x, self)


def fourier_encode(x, enc: FourierEncoder) -> np.ndarray:
    """Encode a vector (d,) or a batch (n, d) into 2K features."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != enc.d:
        raise ValueError(f"expected input dimension {enc.d}, got {x.shape[-1]}")
    z = x @ enc.projection.T
    return np.concatenate([np.sin(z), np.cos(z)], axis=-1)


def raw_encode(x, width: int) -> np.ndarray:
    """Bypass path: zero-pad raw inputs to ``width`` features."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] > width:
        raise ValueError(f"raw input dimension {x.shape[-1]} exceeds {width}")
    pad = [(0, 0)] * (x.ndim - 1) + [(0, width - x.shape[-1])]
    return np.pad(x, pad)


@dataclass
class ForwardTrace:
    x: np.ndarray  # (B, D) encoded input
    pre: np.ndarray  # (B, N)
    act: np.ndarray  # (B, N) tanh(pre), before gating
    factor: np.ndarray | None  # (N,) gating multipliers, None when ungated
    h: np.ndarray  # (B, N) post-gating
    out: np.ndarray  # (B, d_out)
    task: int


class GrowableNet:
    """Flat network whose hidden width grows as tasks arrive."""

    def __init__(self, in_dim: int, seed: int = 0, init_scale: float = 0.15,
                 encoder: FourierEncoder | None = None):
        self.in_dim = int(in_dim)
        self.seed = int(seed)
        self.init_scale = float(init_scale)
        self.encoder = encoder
        self.W_in = np.zeros((0, self.in_dim))
        self.b = np.zeros(0)
        self.importance = np.zeros(0)
        self.head_W: dict[int, np.ndarray] = {}
        self.head_b: dict[int, np.ndarray] = {}
        self.gates: dict[int, np.ndarray] = {}
        self.masks: dict[int, np.ndarray] = {}
        self.readable: dict[int, np.ndarray] = {}
        self.kinds: dict[int, str] = {}
        self._init_rng = substream(seed, "grow")
        self._head_rng = substream(seed, "head")

    @property
    def n_hidden(self) -> int:
        return self.W_in.shape[0]

    @property
    def tasks(self) -> list[int]:
        return sorted(self.head_W)

    def frozen(self) -> np.ndarray:
        return self.importance >= 1.0

    def owned(self) -> np.ndarray:
        """Boolean (N,) of neurons owned by some task."""
        own = np.zeros(self.n_hidden, dtype=bool)
        for m in self.masks.values():
            own |= m
        return own

    def owner_of(self) -> np.ndarray:
        """Owning task id per neuron, -1 for unowned."""
        out = np.full(self.n_hidden, -1, dtype=int)
        for t, m in self.masks.items():
            out[m] = t
        return out

    def add_task(self, task: int, d_out: int = 1, kind: str = REGRESSION) -> None:
        if task in self.head_W:
            raise ValueError(f"task {task} already has a head")
        n = self.n_hidden
        self.head_W[task] = self._head_rng.normal(0.0, 0.1, size=(d_out, n))
        self.head_b[task] = np.zeros(d_out)
        self.gates[task] = np.zeros(n)
        self.masks[task] = np.zeros(n, dtype=bool)
        self.readable[task] = np.zeros(n, dtype=bool)
        self.kinds[task] = kind

    def params(self) -> dict[str, np.ndarray]:
        p = {"W_in": self.W_in, "b": self.b}
        for t in self.head_W:
            p[f"head_W:{t}"] = self.head_W[t]
            p[f"head_b:{t}"] = self.head_b[t]
            p[f"gate:{t}"] = self.gates[t]
        return p

    def set_param(self, key: str, value: np.ndarray) -> None:
        if key == "W_in":
            self.W_in = value
        elif key == "b":
            self.b = value
        else:
            kind, t = key.split(":")
            {"head_W": self.head_W, "head_b": self.head_b, "gate": self.gates}[kind][int(t)] = value

    def copy(self) -> "GrowableNet":
        import copy
        return copy.deepcopy(self)

    def __repr__(self):
        return f"GrowableNet(N={self.n_hidden}, in_dim={self.in_dim}, tasks={self.tasks})"


def forward(net: GrowableNet, x_enc: np.ndarray, task: int, cfg=None) -> ForwardTrace:
    """Hidden tanh layer, optional hybrid gating, then the task's linear head.

    ``x_enc`` may be a single encoded vector or a batch. Gating is applied
    only when ``cfg.use_gating`` is set.
    """
    if task not in net.head_W:
        raise KeyError(f"unknown task {task}")
    x = np.atleast_2d(np.asarray(x_enc, dtype=float))
    if x.shape[1] != net.in_dim:
        raise ValueError(f"encoded input width {x.shape[1]} != {net.in_dim}")
    pre = x @ net.W_in.T + net.b
    act = np.tanh(pre)
    if cfg is not None and cfg.use_gating:
        from .plasticity.gating import gate_factors

        factor = gate_factors(net, task, cfg.suppression)
        h = act * factor
    else:
        factor = None
        h = act
    W = net.head_W[task]
    # All-zero head columns (e.g. just grown) are skipped so that growth
    # leaves the summation, and hence the output bits, unchanged.
    cols = np.flatnonzero(W.any(axis=0))
    if cols.size == W.shape[1]:
        out = h @ W.T + net.head_b[task]
    else:
        out = np.ascontiguousarray(h[:, cols]) @ np.ascontiguousarray(W[:, cols]).T + net.head_b[task]
    return ForwardTrace(x=x, pre=pre, act=act, factor=factor, h=h, out=out, task=task)


def loss_and_delta(out: np.ndarray, target: np.ndarray, kind: str):
    """Mean loss and d(loss)/d(out) for a batch."""
    target = np.asarray(target, dtype=float).reshape(out.shape[0], -1)
    if target.shape != out.shape:
        raise ValueError(f"target shape {target.shape} != output shape {out.shape}")
    n = out.size
    if kind == REGRESSION:
        err = out - target
        return float(np.mean(err * err)), 2.0 * err / n
    if kind == CLASSIFICATION:
        # log(1 + e^z) - y z, stable form
        loss = np.logaddexp(0.0, out) - target * out
        return float(np.mean(loss)), (sigmoid(out) - target) / n
    raise ValueError(f"unknown loss kind {kind!r}")


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def backward_from_delta(net: GrowableNet, trace: ForwardTrace, delta: np.ndarray) -> dict[str, np.ndarray]:
    t = trace.task
    W = net.head_W[t]
    grads = {
        f"head_W:{t}": delta.T @ trace.h,
        f"head_b:{t}": delta.sum(axis=0),
    }
    dh = delta @ W
    if trace.factor is not None:
        own = net.masks[t]
        s = sigmoid(net.gates[t])
        g_gate = np.zeros_like(s)
        g_gate[own] = (dh[:, own] * trace.act[:, own]).sum(axis=0) * s[own] * (1.0 - s[own])
        grads[f"gate:{t}"] = g_gate
    else:
        grads[f"gate:{t}"] = np.zeros(net.n_hidden)
    dact = dh * trace.factor if trace.factor is not None else dh
    dpre = dact * (1.0 - trace.act * trace.act)
    grads["W_in"] = dpre.T @ trace.x
    grads["b"] = dpre.sum(axis=0)
    return grads


def backward(net: GrowableNet, trace: ForwardTrace, target, loss_kind: str):
    """Exact gradients of the mean loss for the traced batch.

    Returns ``(loss, grads)``. Only the active task's head and gate appear in
    ``grads``; every other task's entries are implicitly zero.
    """
    loss, delta = loss_and_delta(trace.out, target, loss_kind)
    return loss, backward_from_delta(net, trace, delta)


def grow(net: GrowableNet, count: int, owner: int | None = None, init_scale: float | None = None) -> np.ndarray:
    """Append ``count`` hidden neurons; returns their indices.

    Existing heads and gates are zero-extended, so outputs of every existing
    task are unchanged.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    scale = net.init_scale if init_scale is None else init_scale
    n0 = net.n_hidden
    n1 = n0 + count
    rows = net._init_rng.normal(0.0, 1.0, size=(count, net.in_dim)) * scale
    net.W_in = np.vstack([net.W_in, rows])
    net.b = np.concatenate([net.b, np.zeros(count)])
    net.importance = np.concatenate([net.importance, np.zeros(count)])
    for t in net.head_W:
        net.head_W[t] = pad_neurons(net.head_W[t], "head_W:", n1)
        net.gates[t] = pad_neurons(net.gates[t], "gate:", n1)
        net.masks[t] = np.concatenate([net.masks[t], np.zeros(count, dtype=bool)])
        net.readable[t] = np.concatenate([net.readable[t], np.zeros(count, dtype=bool)])
    new = np.arange(n0, n1)
    if owner is not None:
        if owner not in net.masks:
            raise KeyError(f"unknown task {owner}")
        net.masks[owner][new] = True
    return new


def save_checkpoint(net: GrowableNet, path) -> None:
    """Write every field of ``net`` to an ``.npz`` archive (bit-exact round trip)."""
    arrays = {
        "meta": np.array([net.in_dim, net.seed], dtype=np.int64),
        "init_scale": np.array(net.init_scale),
        "W_in": net.W_in,
        "b": net.b,
        "importance": net.importance,
        "tasks": np.array(net.tasks, dtype=np.int64),
        "kinds": np.array([net.kinds[t] for t in net.tasks]),
        "init_rng": np.frombuffer(repr(net._init_rng.bit_generator.state).encode(), dtype=np.uint8),
        "head_rng": np.frombuffer(repr(net._head_rng.bit_generator.state).encode(), dtype=np.uint8),
    }
    for t in net.tasks:
        arrays[f"head_W:{t}"] = net.head_W[t]
        arrays[f"head_b:{t}"] = net.head_b[t]
        arrays[f"gate:{t}"] = net.gates[t]
        arrays[f"mask:{t}"] = net.masks[t]
        arrays[f"readable:{t}"] = net.readable[t]
    if net.encoder is not None:
        enc = net.encoder
        arrays["enc_meta"] = np.array([enc.d, enc.k, enc.seed], dtype=np.int64)
        arrays["enc_sigma"] = np.array(enc.sigma)
        arrays["enc_projection"] = enc.projection
    np.savez(path, **arrays)


def load_checkpoint(path) -> GrowableNet:
    import ast

    with np.load(path) as z:
        in_dim, seed = (int(v) for v in z["meta"])
        encoder = None
        if "enc_meta" in z:
            d, k, eseed = (int(v) for v in z["enc_meta"])
            encoder = FourierEncoder(d, k, float(z["enc_sigma"]), eseed, projection=z["enc_projection"])
        net = GrowableNet(in_dim, seed=seed, init_scale=float(z["init_scale"]), encoder=encoder)
        net.W_in = z["W_in"].copy()
        net.b = z["b"].copy()
        net.importance = z["importance"].copy()
        for t, kind in zip(z["tasks"].tolist(), z["kinds"].tolist()):
            net.head_W[t] = z[f"head_W:{t}"].copy()
            net.head_b[t] = z[f"head_b:{t}"].copy()
            net.gates[t] = z[f"gate:{t}"].copy()
            net.masks[t] = z[f"mask:{t}"].copy()
            net.readable[t] = z[f"readable:{t}"].copy()
            net.kinds[t] = str(kind)
        net._init_rng.bit_generator.state = ast.literal_eval(bytes(z["init_rng"]).decode())
        net._head_rng.bit_generator.state = ast.literal_eval(bytes(z["head_rng"]).decode())
    return net
