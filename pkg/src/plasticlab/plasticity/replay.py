"""Meta-replay buffer and mixed-consolidation gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..network import backward, forward


@dataclass
class TaskSummary:
    mean: np.ndarray  # encoded-input mean
    std: np.ndarray  # encoded-input diagonal std
    inputs: np.ndarray  # exemplar encoded inputs (m, D)
    targets: np.ndarray  # exemplar targets (m, d_out)
    kind: str


class ReplayBuffer:
    """Compressed per-task summaries: input statistics plus a few exemplars."""

    def __init__(self, capacity: int = 32):
        self.capacity = int(capacity)
        self.tasks: dict[int, TaskSummary] = {}

    def __len__(self):
        return len(self.tasks)

    def __contains__(self, task):
        return task in self.tasks

    def add(self, task: int, x_enc: np.ndarray, targets: np.ndarray, kind: str,
            rng: np.random.Generator) -> TaskSummary:
        x_enc = np.atleast_2d(x_enc)
        targets = np.asarray(targets, dtype=float).reshape(x_enc.shape[0], -1)
        m = min(self.capacity, x_enc.shape[0])
        idx = np.sort(rng.choice(x_enc.shape[0], size=m, replace=False))
        summary = TaskSummary(
            mean=x_enc.mean(axis=0),
            std=x_enc.std(axis=0),
            inputs=x_enc[idx].copy(),
            targets=targets[idx].copy(),
            kind=kind,
        )
        self.tasks[task] = summary
        return summary

    def sample(self, task: int, batch_size: int, rng: np.random.Generator):
        """Exemplar batch, topped up with Gaussian draws when exemplars run short.

        Synthetic inputs take the label of their nearest exemplar.
        """
        s = self.tasks[task]
        m = s.inputs.shape[0]
        if m >= batch_size:
            idx = rng.choice(m, size=batch_size, replace=False)
            return s.inputs[idx], s.targets[idx]
        extra = batch_size - m
        synth = s.mean + s.std * rng.standard_normal((extra, s.mean.shape[0]))
        d2 = ((synth[:, None, :] - s.inputs[None, :, :]) ** 2).sum(axis=-1)
        labels = s.targets[np.argmin(d2, axis=1)]
        return np.vstack([s.inputs, synth]), np.vstack([s.targets, labels])


def replay_step(net, buffer: ReplayBuffer, current_task: int, cfg, rng: np.random.Generator,
                batch_size: int = 32) -> dict[str, np.ndarray]:
    """With probability ``rho``, a weighted loss gradient on one earlier task.

    Returns an empty dict (zero contribution) when nothing is replayed.
    """
    prior = [t for t in buffer.tasks if t != current_task]
    if not prior or cfg.rho <= 0.0:
        return {}
    if rng.random() >= cfg.rho:
        return {}
    task = prior[int(rng.integers(len(prior)))]
    xb, yb = buffer.sample(task, batch_size, rng)
    tr = forward(net, xb, task, cfg)
    _, grads = backward(net, tr, yb, buffer.tasks[task].kind)
    w = cfg.replay_weight
    return {k: w * v for k, v in grads.items()}
