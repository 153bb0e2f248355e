import numpy as np
import pytest

from plasticlab.network import CLASSIFICATION, REGRESSION, GrowableNet, grow


def make_net(n_hidden=6, in_dim=5, n_tasks=2, seed=0, unowned=2, scale=0.5, head_scale=0.7):
    """Small multi-task net with owned blocks, an unowned tail and random heads/gates."""
    rng = np.random.default_rng(seed)
    net = GrowableNet(in_dim, seed=seed, init_scale=scale)
    per = max(1, (n_hidden - unowned) // n_tasks)
    for t in range(n_tasks):
        net.add_task(t, d_out=1, kind=REGRESSION if t % 2 == 0 else CLASSIFICATION)
        grow(net, per, owner=t)
    if unowned:
        grow(net, unowned)
    net.b = rng.normal(0, 0.3, net.n_hidden)
    for t in range(n_tasks):
        net.head_W[t] = rng.normal(0, head_scale, net.head_W[t].shape)
        net.head_b[t] = rng.normal(0, 0.2, 1)
        net.gates[t] = rng.normal(0, 1.0, net.n_hidden)
    return net


@pytest.fixture
def small_net():
    return make_net()
