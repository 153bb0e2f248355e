"""Growing the hidden layer without disturbing existing tasks, and how the
per-task gate treats owned, foreign and unowned neurons."""

import numpy as np

from plasticlab.network import GrowableNet, forward, grow
from plasticlab.plasticity import MechanismConfig, gate_factors

cfg = MechanismConfig()
net = GrowableNet(in_dim=4, seed=0, init_scale=0.5)
net.add_task(0)
grow(net, 3, owner=0)
net.add_task(1)
grow(net, 2, owner=1)
grow(net, 2)  # unowned, shared by everyone

x = np.random.default_rng(1).normal(size=(5, 4))
before = forward(net, x, 0, cfg).out.copy()

# growth zero-extends heads and gates, so task 0 is bit-for-bit unchanged
new = grow(net, 8, owner=1)
after = forward(net, x, 0, cfg).out
print("grew neurons", new.tolist(), "| task 0 outputs identical:", np.array_equal(before, after))

# owned: sigmoid(gate) = 0.5 at a zero gate; foreign: 0.1; unowned: 1
print("task 0 gate factors:", np.round(gate_factors(net, 0), 2))
net.readable[0][net.masks[1]] = True  # routing can open task 1's neurons to task 0
print("after routing:      ", np.round(gate_factors(net, 0), 2))
