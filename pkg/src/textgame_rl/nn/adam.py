"""Adam with bias correction over a ParamStore."""

from __future__ import annotations

import numpy as np

from .tensor import ParamStore


class AdamState:
    """Per-store first/second moments, a shared step counter, and hyperparameters."""

    def __init__(self, lr: float = 1e-4, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}


def adam_step(store: ParamStore, state: AdamState) -> None:
    """One update of every trainable parameter; missing grads count as zero.

    Frozen parameters are untouched (bit-identical), and all gradients are
    cleared afterwards.
    """
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** state.t
    c2 = 1.0 - b2 ** state.t
    for name in store.names():
        tensor = store[name]
        if not store.is_trainable(name):
            tensor.grad = None
            continue
        g = tensor.grad
        m = state.m.get(name)
        if m is None:
            m = state.m[name] = np.zeros_like(tensor.values)
        v = state.v.get(name)
        if v is None:
            v = state.v[name] = np.zeros_like(tensor.values)
        if g is None:
            m *= b1
            v *= b2
        else:
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
        tensor.values -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
        tensor.grad = None
