#!/usr/bin/env python3
"""Independent reference for the frozen fixtures in network_test.cpp.

Reimplements the xorshift64* stream, Glorot-uniform initialisation and the
ReLU/softmax forward pass with plain integer arithmetic and numpy, then
prints the values the C++ tests assert against.
"""

import numpy as np

MASK = (1 << 64) - 1


class XorShift64Star:
    def __init__(self, seed):
        z = (seed + 0x9E3779B97F4A7C15) & MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        self.state = z ^ (z >> 31)
        if self.state == 0:
            self.state = 0x9E3779B97F4A7C15

    def next(self):
        s = self.state
        s ^= s >> 12
        s ^= (s << 25) & MASK
        s ^= s >> 27
        self.state = s
        return (s * 0x2545F4914F6CDD1D) & MASK

    def uniform(self, lo, hi):
        u = (self.next() >> 11) * 2.0**-53
        return lo + (hi - lo) * u


def init(seed, n_in=784, n_hid=50, n_out=10):
    rng = XorShift64Star(seed)
    a1 = np.sqrt(6.0 / (n_in + n_hid))
    w1 = np.array([rng.uniform(-a1, a1) for _ in range(n_in * n_hid)]).reshape(n_in, n_hid)
    a2 = np.sqrt(6.0 / (n_hid + n_out))
    w2 = np.array([rng.uniform(-a2, a2) for _ in range(n_hid * n_out)]).reshape(n_hid, n_out)
    return w1, w2


def forward(w1, w2, x):
    h = np.maximum(0.0, x @ w1)
    z = h @ w2
    e = np.exp(z - z.max())
    return e / e.sum()


if __name__ == "__main__":
    w1, _ = init(0)
    print("seed 0 first weights:", ", ".join(repr(v) for v in w1.reshape(-1)[:4]))
    w1, w2 = init(42)
    x = np.array([(k % 17) / 16.0 for k in range(784)])
    p = forward(w1, w2, x)
    print("seed 42 forward:", ", ".join(repr(v) for v in p))
