"""Reference layer math and parameter registration.

The functions here operate on single examples with plain numpy and serve as
the readable contract (and as the test oracle) for the batched kernels in
_kernels_*.  Training goes through the tape ops in autodiff.py instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import ParamStore, ShapeError


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


@dataclass
class GRUWeights:
    """The six matrices and three biases of one GRU cell (input E -> hidden H)."""

    W_z: np.ndarray
    W_r: np.ndarray
    W_h: np.ndarray
    U_z: np.ndarray
    U_r: np.ndarray
    U_h: np.ndarray
    b_z: np.ndarray
    b_r: np.ndarray
    b_h: np.ndarray

    @property
    def hidden_size(self) -> int:
        return self.U_z.shape[0]

    @property
    def input_size(self) -> int:
        return self.W_z.shape[0]

    def check(self) -> None:
        E, H = self.input_size, self.hidden_size
        for name in ("W_z", "W_r", "W_h"):
            if getattr(self, name).shape != (E, H):
                raise ShapeError(f"{name} must be {(E, H)}")
        for name in ("U_z", "U_r", "U_h"):
            if getattr(self, name).shape != (H, H):
                raise ShapeError(f"{name} must be {(H, H)}")
        for name in ("b_z", "b_r", "b_h"):
            if getattr(self, name).shape != (H,):
                raise ShapeError(f"{name} must be {(H,)}")


def gru_step(x: np.ndarray, h_prev: np.ndarray, p: GRUWeights) -> np.ndarray:
    """One GRU cell update: h' = (1 - z) * h + z * tanh-candidate."""
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    if x.shape != (p.input_size,) or h_prev.shape != (p.hidden_size,):
        raise ShapeError(
            f"gru_step: x {x.shape} vs E={p.input_size}, h {h_prev.shape} vs H={p.hidden_size}")
    z = sigmoid(x @ p.W_z + h_prev @ p.U_z + p.b_z)
    r = sigmoid(x @ p.W_r + h_prev @ p.U_r + p.b_r)
    hb = np.tanh(x @ p.W_h + (r * h_prev) @ p.U_h + p.b_h)
    return (1.0 - z) * h_prev + z * hb


def gru_encode(xs, p: GRUWeights) -> np.ndarray:
    """Fold gru_step over a non-empty sequence of input vectors from h0 = 0."""
    xs = list(xs)
    if not xs:
        raise ValueError("gru_encode: empty sequence (substitute a padding token)")
    h = np.zeros(p.hidden_size)
    for x in xs:
        h = gru_step(x, h, p)
    return h


def gru_decode_logprob(target, h0, p: GRUWeights, output_projection, emb,
                       bos: int) -> float:
    """Teacher-forced log p(target | h0) under a GRU decoder.

    output_projection is (P, pb) mapping hidden H -> vocab V logits; step t
    consumes emb[target[t-1]] (emb[bos] at t = 0) and scores target[t].
    """
    P, pb = output_projection
    V = P.shape[1]
    target = list(target)
    if not target:
        raise ValueError("gru_decode_logprob: empty target")
    for tok in target:
        if not 0 <= tok < V:
            raise ValueError(f"token id {tok} out of vocab range {V}")
    h = np.asarray(h0, dtype=np.float64)
    logp = 0.0
    prev = bos
    for tok in target:
        h = gru_step(emb[prev], h, p)
        logits = h @ P + pb
        m = logits.max()
        lse = m + np.log(np.exp(logits - m).sum())
        logp += float(logits[tok] - lse)
        prev = tok
    return logp


def mlp_forward(x: np.ndarray, layers) -> np.ndarray:
    """Chain of (W, b, activation) layers; activation is "relu" or None."""
    out = np.asarray(x, dtype=np.float64)
    for W, b, act in layers:
        if out.shape[-1] != W.shape[0]:
            raise ShapeError(f"mlp_forward: {out.shape} @ {W.shape}")
        out = out @ W + b
        if act is None:
            pass
        elif act == "relu":
            out = np.maximum(out, 0.0)
        else:
            raise ValueError(f"unknown activation {act!r}")
    return out


# ---------------------------------------------------------------------------
# initialization / registration


def init_matrix(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); fan_in is the input dim."""
    bound = 1.0 / np.sqrt(shape[0])
    return rng.uniform(-bound, bound, size=shape)


def register_gru(store: ParamStore, prefix: str, input_size: int, hidden_size: int,
                 rng: np.random.Generator) -> None:
    """Register the nine tensors of one GRU cell under prefix."""
    for gate in ("z", "r", "h"):
        store.add(f"{prefix}.W_{gate}", init_matrix(rng, (input_size, hidden_size)))
    for gate in ("z", "r", "h"):
        store.add(f"{prefix}.U_{gate}", init_matrix(rng, (hidden_size, hidden_size)))
    for gate in ("z", "r", "h"):
        store.add(f"{prefix}.b_{gate}", np.zeros(hidden_size))


def gru_weights(store: ParamStore, prefix: str) -> GRUWeights:
    return GRUWeights(
        W_z=store[f"{prefix}.W_z"].values, W_r=store[f"{prefix}.W_r"].values,
        W_h=store[f"{prefix}.W_h"].values, U_z=store[f"{prefix}.U_z"].values,
        U_r=store[f"{prefix}.U_r"].values, U_h=store[f"{prefix}.U_h"].values,
        b_z=store[f"{prefix}.b_z"].values, b_r=store[f"{prefix}.b_r"].values,
        b_h=store[f"{prefix}.b_h"].values)


def register_linear(store: ParamStore, prefix: str, fan_in: int, fan_out: int,
                    rng: np.random.Generator) -> None:
    store.add(f"{prefix}.W", init_matrix(rng, (fan_in, fan_out)))
    store.add(f"{prefix}.b", np.zeros(fan_out))


def register_embedding(store: ParamStore, name: str, vocab_size: int, dim: int,
                       rng: np.random.Generator) -> None:
    bound = 1.0 / np.sqrt(dim)
    store.add(name, rng.uniform(-bound, bound, size=(vocab_size, dim)))
