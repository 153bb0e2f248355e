"""Protecting finished tasks: hard freezing of important neurons and an EWC
penalty restricted to each task's own parameters."""

import hashlib

import numpy as np

from plasticlab.benchgen import generate_track
from plasticlab.plasticity import task_support
from plasticlab.runner import training
from plasticlab.runner.registry import get_config

cfg = get_config("ewc_topology_pertask")
tasks = generate_track("B_MIXED", seed=0)[:3]
state = training.RunState.create(cfg, seed=0)


def digest(net, rows):
    return hashlib.sha256(net.W_in[rows].tobytes()).hexdigest()[:12]


for i, t in enumerate(tasks):
    x, y = t.split("train")
    xe = state.encode(x)
    training.start_task(state, i, xe, t.d_out, t.kind)
    info = training.train_task(state, i, xe, y, t.kind, max_epochs=200, patience=40)
    frozen = np.flatnonzero(state.net.frozen())
    print(f"task {i} ({t.kind}): {info['epochs']} epochs, {state.net.n_hidden} neurons, "
          f"{frozen.size} frozen, frozen-row digest {digest(state.net, frozen)}")

# every per-task Fisher tensor is zero outside that task's support
for task, fisher in state.store.per_task.items():
    sup = task_support(state.net, task)
    outside = sum(float(np.abs(f[~sup[k][tuple(slice(0, s) for s in f.shape)]]).sum())
                  for k, f in fisher.items())
    print(f"Fisher of task {task}: mass outside its support = {outside}")

print("test performance:", np.round(training.evaluate(state, tasks)["perf_per_task"], 3))
