"""Adam over keyed parameter dicts, tolerant of hidden-layer growth."""

import numpy as np

from .network import pad_neurons


class Adam:
    def __init__(self, lr=1e-2, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = {}
        self.v = {}
        self.t = 0

    def step(self, net, grads: dict) -> None:
        """Apply one update to every parameter that has a gradient entry.

        A parameter whose gradient and moments are all zero does not move.
        """
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        params = net.params()
        for k, g in grads.items():
            p = params[k]
            m = self.m.get(k)
            if m is None:
                m = np.zeros_like(p)
                v = np.zeros_like(p)
            elif m.shape != p.shape:
                m = pad_neurons(m, k, net.n_hidden)
                v = pad_neurons(self.v[k], k, net.n_hidden)
            else:
                v = self.v[k]
            m = self.beta1 * m + (1.0 - self.beta1) * g
            v = self.beta2 * v + (1.0 - self.beta2) * g * g
            self.m[k] = m
            self.v[k] = v
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
