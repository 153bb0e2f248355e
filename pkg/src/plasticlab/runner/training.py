"""Per-task training loop and single-track runs."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .. import metrics
from ..benchgen import INPUT_DIM, encode, generate_track
from ..network import FourierEncoder, GrowableNet, backward, forward, grow
from ..optim import Adam
from ..plasticity import ewc, growth, hebbian, importance, pruning, replay, routing
from ..rng import Streams

log = logging.getLogger(__name__)

FOURIER_K = 32
FOURIER_SIGMA = 2.0
BATCH_SIZE = 32

PRESETS = {
    "desk": {"max_epochs": 400, "patience": 60},
    "full": {"max_epochs": 2000, "patience": 300},
}


class NonFiniteLoss(RuntimeError):
    pass


class EarlyStopping:
    """Stop once the best loss is ``patience`` epochs old."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best = float("inf")
        self.best_epoch = -1
        self.epoch = -1

    def step(self, loss: float) -> bool:
        self.epoch += 1
        if loss < self.best:
            self.best = loss
            self.best_epoch = self.epoch
        return self.epoch - self.best_epoch >= self.patience


def add_into(acc: dict, extra: dict) -> dict:
    for k, v in extra.items():
        acc[k] = acc[k] + v if k in acc else v
    return acc


@dataclass
class RunState:
    """Everything a track run carries from one task to the next."""

    cfg: object
    seed: int
    net: GrowableNet
    encoder: FourierEncoder
    streams: Streams
    buffer: replay.ReplayBuffer
    store: ewc.FisherStore | None = None
    events: dict = field(default_factory=lambda: {
        "growth": 0, "pruned": 0, "regenerated": 0, "replay_steps": 0, "reuse": 0, "freeze": 0})
    similarities: list = field(default_factory=list)
    log: list = field(default_factory=list)

    @classmethod
    def create(cls, cfg, seed: int):
        enc = FourierEncoder(INPUT_DIM, FOURIER_K, FOURIER_SIGMA, seed)
        net = GrowableNet(enc.out_dim, seed=seed, init_scale=cfg.init_scale, encoder=enc)
        store = ewc.FisherStore(cfg.use_ewc) if cfg.use_ewc != "off" else None
        return cls(cfg=cfg, seed=seed, net=net, encoder=enc, streams=Streams(seed),
                   buffer=replay.ReplayBuffer(cfg.replay_capacity), store=store)

    def encode(self, x):
        return encode(x, self.encoder, self.cfg.use_fourier)

    def after_growth(self):
        if self.store is not None:
            self.store.resize(self.net.n_hidden)


def start_task(state: RunState, task: int, x_enc: np.ndarray, d_out: int, kind: str) -> dict:
    """Create the task head and its owned start block (halved on reuse)."""
    cfg, net = state.cfg, state.net
    decision = None
    if cfg.use_similarity and len(state.buffer):
        decision = routing.route_by_similarity(state.buffer, x_enc.mean(axis=0), cfg)
        state.similarities.append(decision.similarity)
    reuse = decision is not None and decision.reuse
    block = max(1, cfg.start_block // 2) if reuse else cfg.start_block
    net.add_task(task, d_out=d_out, kind=kind)
    grow(net, block, owner=task)
    if reuse:
        net.readable[task] = net.masks[decision.similar_task].copy()
        state.events["reuse"] += 1
    state.after_growth()
    return {"block": block, "reuse": reuse,
            "similar_task": None if decision is None else decision.similar_task,
            "similarity": None if decision is None else decision.similarity}


def train_task(state: RunState, task: int, x_enc: np.ndarray, y: np.ndarray, kind: str,
               max_epochs: int = 2000, patience: int = 300, batch_size: int = BATCH_SIZE) -> dict:
    """Train ``task`` until early stopping, then consolidate it."""
    cfg, net = state.cfg, state.net
    n = x_enc.shape[0]
    opt = Adam()
    ctl = growth.GrowthController()
    stopper = EarlyStopping(patience)
    batch_rng = state.streams("batch")
    replay_rng = state.streams("replay")
    losses = []
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        order = batch_rng.permutation(n)
        total = 0.0
        for s in range(0, n, batch_size):
            idx = order[s:s + batch_size]
            tr = forward(net, x_enc[idx], task, cfg)
            loss, grads = backward(net, tr, y[idx], kind)
            total += loss * len(idx)
            if state.store is not None and len(state.store):
                add_into(grads, ewc.ewc_penalty_grad(net, state.store, cfg.lambda_ewc))
            if cfg.use_replay:
                rg = replay.replay_step(net, state.buffer, task, cfg, replay_rng, batch_size)
                if rg:
                    state.events["replay_steps"] += 1
                    add_into(grads, rg)
            importance.apply_freeze_scaling(grads, net.importance, cfg.use_continuous_importance)
            opt.step(net, grads)
            if cfg.use_hebbian:
                hebbian.hebbian_update(net, tr, task, cfg)
            if cfg.use_continuous_importance:
                net.importance = importance.update_importance(net.importance, tr.h, cfg.alpha, cfg.tau)
        epoch_loss = total / n
        if not np.isfinite(epoch_loss):
            raise NonFiniteLoss(f"non-finite loss on task {task} at epoch {epoch}")
        losses.append(epoch_loss)
        new = growth.maybe_grow(ctl, epoch_loss, epoch, net, task, cfg)
        if new is not None:
            state.events["growth"] += 1
            state.log.append({"event": "growth", "task": task, "epoch": epoch, "count": len(new),
                              "owned": bool(cfg.use_adaptive_growth)})
            state.after_growth()
        if stopper.step(epoch_loss):
            break
    consolidate(state, task, x_enc, y, kind)
    return {"task": task, "epochs": epoch, "final_loss": losses[-1], "best_loss": stopper.best}


def consolidate(state: RunState, task: int, x_enc, y, kind) -> None:
    """Post-task steps: prune/regenerate, Fisher, replay summary, freeze."""
    cfg, net = state.cfg, state.net
    if cfg.use_pruning:
        rep = pruning.prune_and_regenerate(net, task, cfg, state.streams("prune"))
        state.events["pruned"] += rep.pruned
        state.events["regenerated"] += rep.regenerated
        state.log.append({"event": "prune", "task": task, "pruned": rep.pruned,
                          "regenerated": rep.regenerated})
    if state.store is not None:
        ewc.compute_fisher(net, x_enc, y, task, kind, state.store, cfg)
    state.buffer.add(task, x_enc, y, kind, state.streams("buffer"))
    importance.freeze_task(net, task)
    state.events["freeze"] += 1
    state.log.append({"event": "freeze", "task": task, "neurons": int(net.masks[task].sum())})


def evaluate(state: RunState, tasks) -> dict:
    """Perf per task, RD and GCR for the final network state."""
    net, cfg = state.net, state.cfg
    perfs, rd_in, gcr_in = [], [], []
    for i, t in enumerate(tasks):
        x, y = t.split("test")
        xe = state.encode(x)
        out = forward(net, xe, i, cfg).out
        perfs.append(metrics.perf_task(out, y, t.kind))
        rd_in.append((i, xe))
        gcr_in.append((i, xe, y, t.kind))
    rd = metrics.representation_diversity(net, rd_in, cfg) if len(tasks) > 1 else 0.0
    gcr = metrics.gradient_conflict_rate(net, gcr_in, cfg) if len(tasks) > 1 else 0.0
    return {"perf_per_task": perfs, "Perf": float(np.mean(perfs)), "RD": rd, "GCR": gcr,
            "gate_pass_rate": metrics.gate_pass_rate(perfs)}


def run_track(cfg, track: str, seed: int, max_epochs: int = 400, patience: int = 60,
              tasks=None) -> dict:
    """Train a fresh network through every task of ``track`` and score it."""
    t0 = time.perf_counter()
    tasks = generate_track(track, seed) if tasks is None else tasks
    state = RunState.create(cfg, seed)
    epochs = []
    for i, t in enumerate(tasks):
        x, y = t.split("train")
        xe = state.encode(x)
        start_task(state, i, xe, t.d_out, t.kind)
        info = train_task(state, i, xe, y, t.kind, max_epochs=max_epochs, patience=patience)
        epochs.append(info["epochs"])
        log.debug("%s %s seed=%d task=%d epochs=%d loss=%.4g", cfg.name, track, seed, i,
                  info["epochs"], info["final_loss"])
    scores = evaluate(state, tasks)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return {
        **scores,
        "epochs_per_task": epochs,
        "events": dict(state.events),
        "n_hidden": state.net.n_hidden,
        "mean_similarity": float(np.mean(state.similarities)) if state.similarities else None,
        "wall_ms": wall_ms,
        "state": state,
    }
