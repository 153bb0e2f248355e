"""Seeded generators for the four benchmark tracks (31 tasks).

All draws use PCG64 sub-streams named ``data/<track>/<task>/<attempt>`` under
the track seed (see :mod:`plasticlab.rng`), so datasets are bit-reproducible.

Tracks
------
B1
    8 regression tasks ``y = sin(2 pi f_t x_1 + phase_t)``, ``f_t = 0.5 t``,
    ``x_1 ~ U[-1, 1]`` with the other inputs zero.
B4
    5 binary tasks ``1[x_i x_j > 0]`` on ``x ~ N(0, 0.1^2 I_8)``. The small
    input scale keeps the interaction inside the smooth band of the encoder;
    the labels are scale-invariant.
B_LOGIC
    8 Boolean gates on 2-3 jittered bits. Truth-table rows are drawn
    class-balanced so AND/NOR-style gates are not 75/25.
B_MIXED
    10 tasks, regression at odd positions and classification at even ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .network import CLASSIFICATION, REGRESSION, fourier_encode, raw_encode
from .plasticity.routing import cosine
from .rng import substream

INPUT_DIM = 8
N_SAMPLES = 512
N_TRAIN = 256

LOGIC_GATES = {
    "AND": (2, lambda a, b, c: a & b),
    "OR": (2, lambda a, b, c: a | b),
    "XOR": (2, lambda a, b, c: a ^ b),
    "NAND": (2, lambda a, b, c: 1 - (a & b)),
    "NOR": (2, lambda a, b, c: 1 - (a | b)),
    "XNOR": (2, lambda a, b, c: 1 - (a ^ b)),
    "AND_OR": (3, lambda a, b, c: (a & b) | c),
    "XOR_AND": (3, lambda a, b, c: (a ^ b) & c),
}

B4_PAIRS = [(0, 1), (2, 3), (4, 5), (6, 7), (0, 4)]
B4_INPUT_SCALE = 0.1


@dataclass
class TaskDataset:
    track: str
    index: int
    kind: str
    x: np.ndarray  # (n, d) raw inputs
    y: np.ndarray  # (n, d_out)
    train_idx: np.ndarray
    test_idx: np.ndarray
    seed: int
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d_out(self) -> int:
        return self.y.shape[1]

    @property
    def name(self) -> str:
        return f"{self.track}/{self.index}"

    def split(self, which: str):
        idx = self.train_idx if which == "train" else self.test_idx
        return self.x[idx], self.y[idx]


@dataclass(frozen=True)
class TrackSpec:
    track: str
    tasks: tuple  # per-task generator parameters

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)


def _b1_task(f):
    return {"family": "sine", "freq": f}


def _b4_task(pair):
    return {"family": "interaction", "pair": pair}


def _logic_task(gate):
    return {"family": "logic", "gate": gate}


TRACKS = {
    "B1": TrackSpec("B1", tuple(_b1_task(0.5 * t) for t in range(1, 9))),
    "B4": TrackSpec("B4", tuple(_b4_task(p) for p in B4_PAIRS)),
    "B_LOGIC": TrackSpec("B_LOGIC", tuple(_logic_task(g) for g in LOGIC_GATES)),
    "B_MIXED": TrackSpec("B_MIXED", (
        _b1_task(0.5), _b4_task((0, 1)),
        _b1_task(1.0), _logic_task("XOR"),
        _b1_task(1.5), _b4_task((2, 3)),
        _b1_task(2.0), _logic_task("AND_OR"),
        _b1_task(2.5), _b4_task((0, 4)),
    )),
}
TRACK_IDS = tuple(TRACKS)


def sine_task(rng, freq, n=N_SAMPLES):
    phase = rng.uniform(0.0, 2.0 * np.pi)
    x = np.zeros((n, INPUT_DIM))
    x[:, 0] = rng.uniform(-1.0, 1.0, size=n)
    y = np.sin(2.0 * np.pi * freq * x[:, 0] + phase)
    return x, y[:, None], {"phase": phase}


def interaction_task(rng, pair, n=N_SAMPLES, scale=B4_INPUT_SCALE):
    x = scale * rng.standard_normal((n, INPUT_DIM))
    i, j = pair
    y = (x[:, i] * x[:, j] > 0).astype(float)
    return x, y[:, None], {}


def logic_rows(gate):
    arity, fn = LOGIC_GATES[gate]
    rows = np.array([[(r >> 2) & 1, (r >> 1) & 1, r & 1] for r in range(8)])
    if arity == 2:
        rows = rows[rows[:, 2] == 0]
    labels = fn(rows[:, 0], rows[:, 1], rows[:, 2])
    return rows, labels


def logic_task(rng, gate, n=N_SAMPLES, jitter=0.1):
    arity, _ = LOGIC_GATES[gate]
    rows, labels = logic_rows(gate)
    pos = np.flatnonzero(labels == 1)
    neg = np.flatnonzero(labels == 0)
    want_pos = rng.random(n) < 0.5
    pick = np.where(want_pos, pos[rng.integers(len(pos), size=n)], neg[rng.integers(len(neg), size=n)])
    bits = rows[pick].astype(float)
    x = np.zeros((n, INPUT_DIM))
    x[:, :arity] = bits[:, :arity] + jitter * rng.standard_normal((n, arity))
    y = labels[pick].astype(float)
    return x, y[:, None], {}


def generate_task(track: str, index: int, params: dict, seed: int, max_attempts: int = 100) -> TaskDataset:
    family = params["family"]
    for attempt in range(max_attempts):
        rng = substream(seed, f"data/{track}/{index}/{attempt}")
        if family == "sine":
            x, y, extra = sine_task(rng, params["freq"])
            kind = REGRESSION
        elif family == "interaction":
            x, y, extra = interaction_task(rng, params["pair"])
            kind = CLASSIFICATION
        elif family == "logic":
            x, y, extra = logic_task(rng, params["gate"])
            kind = CLASSIFICATION
        else:
            raise ValueError(f"unknown task family {family!r}")
        if kind == CLASSIFICATION and not 0.3 <= y.mean() <= 0.7:
            continue
        perm = rng.permutation(x.shape[0])
        return TaskDataset(
            track=track, index=index, kind=kind, x=x, y=y,
            train_idx=np.sort(perm[:N_TRAIN]), test_idx=np.sort(perm[N_TRAIN:]),
            seed=seed, params={**params, **extra, "attempt": attempt},
        )
    raise RuntimeError(f"could not balance labels for {track}/{index}")


def generate_track(spec, seed: int = 0) -> list[TaskDataset]:
    """All tasks of a track, in presentation order."""
    if isinstance(spec, str):
        if spec not in TRACKS:
            raise KeyError(f"unknown track {spec!r}; expected one of {TRACK_IDS}")
        spec = TRACKS[spec]
    if spec.track not in TRACKS:
        raise KeyError(f"unknown track {spec.track!r}")
    return [generate_task(spec.track, i, p, seed) for i, p in enumerate(spec.tasks)]


def encode(x, enc, use_fourier: bool = True) -> np.ndarray:
    if use_fourier:
        return fourier_encode(x, enc)
    return raw_encode(x, enc.out_dim)


def task_similarity_matrix(tasks, enc, use_fourier: bool = True):
    """Cosine similarity of mean encoded inputs for every task pair.

    Returns ``(matrix, mean_offdiag)``.
    """
    if len(tasks) < 2:
        raise ValueError("need at least two tasks")
    means = [encode(t.x, enc, use_fourier).mean(axis=0) for t in tasks]
    n = len(means)
    S = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            S[i, j] = S[j, i] = cosine(means[i], means[j])
    iu = np.triu_indices(n, k=1)
    return S, float(S[iu].mean())


def write_task(task: TaskDataset, path) -> None:
    """Columnar text: one ``key=value`` header line, then ``split x... y...`` rows."""
    header = (f"track={task.track} task={task.index} kind={task.kind} n={task.n} "
              f"d={task.x.shape[1]} d_out={task.d_out} seed={task.seed}")
    split = np.zeros(task.n)
    split[task.test_idx] = 1.0
    table = np.column_stack([split, task.x, task.y])
    np.savetxt(path, table, fmt="%.17g", header=header)


def read_task(path) -> TaskDataset:
    with open(path) as fh:
        first = fh.readline().lstrip("#").split()
    meta = dict(kv.split("=", 1) for kv in first)
    table = np.loadtxt(path, ndmin=2)
    d, d_out = int(meta["d"]), int(meta["d_out"])
    split = table[:, 0]
    return TaskDataset(
        track=meta["track"], index=int(meta["task"]), kind=meta["kind"],
        x=table[:, 1:1 + d], y=table[:, 1 + d:1 + d + d_out],
        train_idx=np.flatnonzero(split == 0), test_idx=np.flatnonzero(split == 1),
        seed=int(meta["seed"]),
    )


def write_tracks(out_dir, seed: int = 0, tracks=TRACK_IDS) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for tr in tracks:
        for task in generate_track(tr, seed):
            p = out / f"{tr}_{task.index:02d}.txt"
            write_task(task, p)
            paths.append(p)
    return paths
