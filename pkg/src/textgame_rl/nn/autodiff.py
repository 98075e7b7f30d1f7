"""Reverse-mode tape over fused array ops.

A training step builds a couple dozen Value nodes (whole-sequence GRU encodes,
linear layers, reductions); backward() walks them in reverse topological order
and flushes leaf gradients into their ParamStore tensors.  Frozen parameters
never receive gradients.
"""

from __future__ import annotations

import numpy as np

from ..backend import kernels as K
from .tensor import ParamStore, ShapeError, Tensor


class Value:
    """One node of the tape: an ndarray plus a backward closure."""

    __slots__ = ("data", "grad", "parents", "backward_fn")

    def __init__(self, data, parents=(), backward_fn=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.parents: tuple[Value, ...] = parents
        self.backward_fn = backward_fn

    @property
    def shape(self):
        return self.data.shape


class ParamValue(Value):
    """Leaf bound to a named ParamStore tensor."""

    __slots__ = ("store", "name")

    def __init__(self, store: ParamStore, name: str):
        super().__init__(store[name].values)
        self.store = store
        self.name = name


def param(store: ParamStore, name: str) -> ParamValue:
    return ParamValue(store, name)


def constant(data) -> Value:
    return Value(data)


def _accum(node: Value, g) -> None:
    if node.grad is None:
        node.grad = np.zeros_like(node.data)
    node.grad += g


def backward(loss: Value) -> None:
    """Backprop from a scalar loss; flushes grads of trainable leaf params."""
    if loss.data.shape != ():
        raise ShapeError(f"backward needs a scalar loss, got shape {loss.data.shape}")
    order: list[Value] = []
    seen: set[int] = set()
    stack: list[tuple[Value, bool]] = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        if node.grad is None:
            continue
        if node.backward_fn is not None:
            node.backward_fn(node.grad)
        if isinstance(node, ParamValue) and node.store.is_trainable(node.name):
            node.store[node.name].ensure_grad()
            node.store[node.name].grad += node.grad


# ---------------------------------------------------------------------------
# ops


def lookup(emb: Value, ids: np.ndarray) -> Value:
    """Embedding rows for time-major ids (T, B) -> (T, B, E)."""
    ids = np.ascontiguousarray(ids, dtype=np.int64)
    out_data = np.ascontiguousarray(emb.data[ids])

    def bwd(g):
        demb = np.zeros_like(emb.data)
        K.embed_backward(ids, np.ascontiguousarray(g), demb)
        _accum(emb, demb)

    return Value(out_data, (emb,), bwd)


def _stack_gru(pz, pr, ph):
    """Stack (W, U, b) triples for the z, r, h gates into kernel layout."""
    Wzr = np.ascontiguousarray(np.hstack((pz[0].data, pr[0].data)))
    Wh = np.ascontiguousarray(ph[0].data)
    Uzr = np.ascontiguousarray(np.hstack((pz[1].data, pr[1].data)))
    Uh = np.ascontiguousarray(ph[1].data)
    bzr = np.ascontiguousarray(np.concatenate((pz[2].data, pr[2].data)))
    bh = np.ascontiguousarray(ph[2].data)
    return Wzr, Wh, Uzr, Uh, bzr, bh


def gru_sequence(x: Value, lengths: np.ndarray, pz, pr, ph) -> Value:
    """Final GRU hidden state over padded (T, B, E) inputs from h0 = 0.

    pz, pr, ph are (W, U, b) Value triples for the update, reset and
    candidate gates.
    """
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    Wzr, Wh, Uzr, Uh, bzr, bh = _stack_gru(pz, pr, ph)
    Hs, Z, R, HB = K.gru_seq_forward(np.ascontiguousarray(x.data), lengths,
                                     Wzr, Wh, Uzr, Uh, bzr, bh)
    H = Wh.shape[1]

    def bwd(g):
        dX, dWzr, dWh, dUzr, dUh, dbzr, dbh, _ = K.gru_seq_backward(
            np.ascontiguousarray(g), x.data, Hs, Z, R, HB, Wzr, Wh, Uzr, Uh)
        _accum(x, dX)
        _accum(pz[0], dWzr[:, :H])
        _accum(pr[0], dWzr[:, H:])
        _accum(ph[0], dWh)
        _accum(pz[1], dUzr[:, :H])
        _accum(pr[1], dUzr[:, H:])
        _accum(ph[1], dUh)
        _accum(pz[2], dbzr[:H])
        _accum(pr[2], dbzr[H:])
        _accum(ph[2], dbh)

    parents = (x, pz[0], pz[1], pz[2], pr[0], pr[1], pr[2], ph[0], ph[1], ph[2])
    return Value(Hs[-1].copy(), parents, bwd)


def gru_decode(emb: Value, h0: Value, targets: np.ndarray, lengths: np.ndarray,
               pz, pr, ph, proj_w: Value, proj_b: Value, bos: int) -> Value:
    """Teacher-forced per-row log-likelihood of (T, B) target token ids."""
    targets = np.ascontiguousarray(targets, dtype=np.int64)
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    Wzr, Wh, Uzr, Uh, bzr, bh = _stack_gru(pz, pr, ph)
    P = np.ascontiguousarray(proj_w.data)
    pb = np.ascontiguousarray(proj_b.data)
    logp, X, Hs, Z, R, HB, Probs = K.gru_decode_forward(
        np.ascontiguousarray(emb.data), targets, lengths,
        np.ascontiguousarray(h0.data), Wzr, Wh, Uzr, Uh, bzr, bh, P, pb, bos)
    H = Wh.shape[1]

    def bwd(g):
        demb = np.zeros_like(emb.data)
        dh0, dWzr, dWh, dUzr, dUh, dbzr, dbh, dP, dpb = K.gru_decode_backward(
            np.ascontiguousarray(g), targets, lengths, X, Hs, Z, R, HB, Probs,
            Wzr, Wh, Uzr, Uh, P, demb, bos)
        _accum(emb, demb)
        _accum(h0, dh0)
        _accum(pz[0], dWzr[:, :H])
        _accum(pr[0], dWzr[:, H:])
        _accum(ph[0], dWh)
        _accum(pz[1], dUzr[:, :H])
        _accum(pr[1], dUzr[:, H:])
        _accum(ph[1], dUh)
        _accum(pz[2], dbzr[:H])
        _accum(pr[2], dbzr[H:])
        _accum(ph[2], dbh)
        _accum(proj_w, dP)
        _accum(proj_b, dpb)

    parents = (emb, h0, pz[0], pz[1], pz[2], pr[0], pr[1], pr[2],
               ph[0], ph[1], ph[2], proj_w, proj_b)
    return Value(logp, parents, bwd)


def linear(x: Value, w: Value, b: Value) -> Value:
    if x.data.shape[-1] != w.data.shape[0]:
        raise ShapeError(f"linear: {x.data.shape} @ {w.data.shape}")
    out = Value(x.data @ w.data + b.data, (x, w, b))

    def bwd(g):
        _accum(x, g @ w.data.T)
        _accum(w, x.data.T @ g)
        _accum(b, g.sum(axis=0) if g.ndim > 1 else g)

    out.backward_fn = bwd
    return out


def relu(x: Value) -> Value:
    mask = x.data > 0.0
    out = Value(np.where(mask, x.data, 0.0), (x,))
    out.backward_fn = lambda g: _accum(x, np.where(mask, g, 0.0))
    return out


def concat_cols(a: Value, b: Value) -> Value:
    ka = a.data.shape[1]
    out = Value(np.concatenate((a.data, b.data), axis=1), (a, b))

    def bwd(g):
        _accum(a, g[:, :ka])
        _accum(b, g[:, ka:])

    out.backward_fn = bwd
    return out


def gather_rows(x: Value, idx: np.ndarray) -> Value:
    idx = np.asarray(idx, dtype=np.int64)
    out = Value(x.data[idx], (x,))

    def bwd(g):
        dx = np.zeros_like(x.data)
        np.add.at(dx, idx, g)
        _accum(x, dx)

    out.backward_fn = bwd
    return out


def flatten1(x: Value) -> Value:
    """(B, 1) -> (B,)."""
    out = Value(x.data[:, 0], (x,))
    out.backward_fn = lambda g: _accum(x, g[:, None])
    return out


def sub(a: Value, b: Value) -> Value:
    out = Value(a.data - b.data, (a, b))

    def bwd(g):
        _accum(a, g)
        _accum(b, -g)

    out.backward_fn = bwd
    return out


def square(x: Value) -> Value:
    out = Value(x.data * x.data, (x,))
    out.backward_fn = lambda g: _accum(x, 2.0 * x.data * g)
    return out


def mean(x: Value) -> Value:
    n = x.data.size
    out = Value(np.float64(x.data.mean()), (x,))
    out.backward_fn = lambda g: _accum(x, np.full_like(x.data, float(g) / n))
    return out


def total(x: Value) -> Value:
    out = Value(np.float64(x.data.sum()), (x,))
    out.backward_fn = lambda g: _accum(x, np.full_like(x.data, float(g)))
    return out


def scale(x: Value, c: float) -> Value:
    out = Value(x.data * c, (x,))
    out.backward_fn = lambda g: _accum(x, g * c)
    return out


def add(a: Value, b: Value) -> Value:
    if a.data.shape != b.data.shape:
        raise ShapeError(f"add: {a.data.shape} vs {b.data.shape}")
    out = Value(a.data + b.data, (a, b))

    def bwd(g):
        _accum(a, g)
        _accum(b, g)

    out.backward_fn = bwd
    return out
