"""Central finite-difference verification of tape gradients."""

from __future__ import annotations

import numpy as np

from .autodiff import backward
from .tensor import ParamStore


def grad_check(loss_fn, store: ParamStore, rng: np.random.Generator | None = None,
               max_entries_per_param: int = 8, eps: float = 1e-5) -> float:
    """Max relative error between tape gradients and central differences.

    loss_fn() must rebuild the forward pass from the store's current values
    and return a scalar Value.  Relative error per sampled entry is
    |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    store.zero_grads()
    backward(loss_fn())
    analytic = {}
    for name in store.names():
        if store.is_trainable(name):
            g = store[name].grad
            analytic[name] = np.zeros_like(store[name].values) if g is None else g.copy()
    store.zero_grads()

    worst = 0.0
    for name, ana in analytic.items():
        values = store[name].values
        n = values.size
        if n <= max_entries_per_param:
            idxs = np.arange(n)
        else:
            idxs = rng.choice(n, size=max_entries_per_param, replace=False)
        flat = values.reshape(-1)
        for idx in idxs:
            orig = flat[idx]
            flat[idx] = orig + eps
            up = float(loss_fn().data)
            flat[idx] = orig - eps
            down = float(loss_fn().data)
            flat[idx] = orig
            numeric = (up - down) / (2.0 * eps)
            a = float(ana.reshape(-1)[idx])
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
            if rel > worst:
                worst = rel
    return worst
