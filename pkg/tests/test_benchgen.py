import math

import numpy as np
import pytest

from plasticlab import benchgen
from plasticlab.benchgen import (
    TRACKS, generate_track, logic_rows, read_task, task_similarity_matrix, write_task, write_tracks,
)
from plasticlab.network import CLASSIFICATION, REGRESSION, FourierEncoder
from plasticlab.rng import substream


def test_track_counts():
    counts = {t: len(generate_track(t, 0)) for t in TRACKS}
    assert counts == {"B1": 8, "B4": 5, "B_LOGIC": 8, "B_MIXED": 10}
    assert sum(counts.values()) == 31


def test_unknown_track():
    with pytest.raises(KeyError):
        generate_track("B9", 0)


def test_xor_truth_table():
    rows, labels = logic_rows("XOR")
    table = {tuple(r[:2]): int(y) for r, y in zip(rows, labels)}
    assert table == {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}


def test_xor_task_zero_jitter():
    x, y, _ = benchgen.logic_task(np.random.default_rng(0), "XOR", n=64, jitter=0.0)
    for xi, yi in zip(x, y[:, 0]):
        a, b = int(xi[0]), int(xi[1])
        assert yi == a ^ b
        assert np.all(xi[2:] == 0)


@pytest.mark.parametrize("gate, fn", [
    ("AND_OR", lambda a, b, c: (a & b) | c),
    ("XOR_AND", lambda a, b, c: (a ^ b) & c),
    ("NAND", lambda a, b, c: 1 - (a & b)),
])
def test_composite_gates(gate, fn):
    rows, labels = logic_rows(gate)
    for r, y in zip(rows, labels):
        assert y == fn(*r)


def test_b1_closed_form():
    tasks = generate_track("B1", 3)
    t = tasks[1]  # t = 2, f = 1.0
    assert t.params["freq"] == 1.0
    rng = substream(3, f"data/B1/1/{t.params['attempt']}")
    phase = rng.uniform(0.0, 2.0 * math.pi)
    assert t.params["phase"] == phase
    x1 = t.x[:, 0]
    np.testing.assert_allclose(t.y[:, 0], np.sin(2 * math.pi * 1.0 * x1 + phase), rtol=0, atol=1e-15)
    # at x1 = 0 the target is sin(phase)
    assert math.sin(2 * math.pi * 1.0 * 0.0 + phase) == pytest.approx(math.sin(phase))
    assert np.all(t.x[:, 1:] == 0)


def test_frequencies():
    assert [t.params["freq"] for t in generate_track("B1", 0)] == [0.5 * k for k in range(1, 9)]
    mixed = generate_track("B_MIXED", 0)
    assert [t.params["freq"] for t in mixed[::2]] == [0.5, 1.0, 1.5, 2.0, 2.5]
    assert all(t.kind == REGRESSION for t in mixed[::2])
    assert all(t.kind == CLASSIFICATION for t in mixed[1::2])


@pytest.mark.parametrize("track", list(TRACKS))
def test_invariants(track):
    for t in generate_track(track, 1):
        assert len(t.train_idx) == 256 and len(t.test_idx) == 256
        assert not set(t.train_idx) & set(t.test_idx)
        assert t.x.shape == (512, 8)
        if t.kind == REGRESSION:
            assert np.all(np.abs(t.y) <= 1)
        else:
            assert set(np.unique(t.y)) <= {0.0, 1.0}
            assert 0.3 <= t.y.mean() <= 0.7


def test_b4_labels_follow_pairs():
    for t, (i, j) in zip(generate_track("B4", 2), benchgen.B4_PAIRS):
        assert np.array_equal(t.y[:, 0], (t.x[:, i] * t.x[:, j] > 0).astype(float))


def test_reproducible():
    a, b = generate_track("B_MIXED", 5), generate_track("B_MIXED", 5)
    for s, t in zip(a, b):
        assert np.array_equal(s.x, t.x) and np.array_equal(s.y, t.y)
        assert np.array_equal(s.train_idx, t.train_idx)
    c = generate_track("B_MIXED", 6)
    assert not np.array_equal(a[0].x, c[0].x)


def test_text_round_trip(tmp_path):
    for t in generate_track("B_LOGIC", 0)[:2] + generate_track("B1", 0)[:1]:
        p = tmp_path / "t.txt"
        write_task(t, p)
        first = p.read_text().splitlines()[0]
        for key in ("track=", "task=", "kind=", "n=", "d=", "d_out=", "seed="):
            assert key in first
        back = read_task(p)
        assert np.array_equal(back.x, t.x) and np.array_equal(back.y, t.y)
        assert np.array_equal(back.train_idx, t.train_idx) and np.array_equal(back.test_idx, t.test_idx)
        assert (back.track, back.index, back.kind, back.seed) == (t.track, t.index, t.kind, t.seed)


def test_write_tracks(tmp_path):
    paths = write_tracks(tmp_path, 0)
    assert len(paths) == 31


def test_similarity_self_and_identical():
    enc = FourierEncoder(seed=0)
    tasks = generate_track("B1", 0)[:3]
    S, mean = task_similarity_matrix(tasks, enc)
    assert np.allclose(np.diag(S), 1.0) and np.allclose(S, S.T)
    # B1 tasks share the input distribution
    assert mean > 0.99


def test_similarity_orthogonal_hand_tasks():
    class _T:
        def __init__(self, x):
            self.x = x

    # raw path with one-hot single points: orthogonal encodings
    tasks = [_T(np.eye(8)[i:i + 1]) for i in range(3)]
    S, mean = task_similarity_matrix(tasks, FourierEncoder(seed=0), use_fourier=False)
    assert mean == 0.0
    with pytest.raises(ValueError):
        task_similarity_matrix(tasks[:1], FourierEncoder())
