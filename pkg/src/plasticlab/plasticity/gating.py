"""Hybrid gating: a learned per-task context vector over hidden neurons."""

import numpy as np

SUPPRESSION = 0.1


def gate_factors(net, task: int, suppression: float = SUPPRESSION) -> np.ndarray:
    """Per-neuron multipliers applied to hidden activations for ``task``.

    Owned neurons pass through ``sigmoid(g)``, neurons owned by another task
    (and not made readable by routing) are scaled by ``suppression``, and
    unowned or readable neurons pass unchanged.
    """
    own = net.masks[task]
    factor = np.ones(net.n_hidden)
    other = np.zeros(net.n_hidden, dtype=bool)
    for t, m in net.masks.items():
        if t != task:
            other |= m
    other &= ~own & ~net.readable[task]
    factor[other] = suppression
    g = net.gates[task][own]
    factor[own] = 0.5 * (1.0 + np.tanh(0.5 * g))
    return factor


def apply_gating(h: np.ndarray, net, task: int, enabled: bool = True,
                 suppression: float = SUPPRESSION) -> np.ndarray:
    if not enabled:
        return h
    return h * gate_factors(net, task, suppression)
