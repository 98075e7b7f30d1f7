"""The text-pair Q-network: two encoders plus a concat MLP scorer.

Q(o, a) = g(concat(f_o(o), f_a(a))) where f_o / f_a are trainable GRU text
encoders in base and min-ob modes, or the fixed hash front end in hash mode
(in which case only g carries trainable parameters).
"""

from __future__ import annotations

import numpy as np

from .. import nn
from ..encoders import EncoderConfig, TextEncoder, Vocab
from ..hashing import HashEncoder
from ..nn import ParamStore


def softmax_probs(q_values: np.ndarray) -> np.ndarray:
    """Boltzmann action distribution, max-shifted for stability."""
    q = np.asarray(q_values, dtype=np.float64)
    if q.size == 0:
        raise ValueError("empty action-value list")
    if not np.all(np.isfinite(q)):
        raise ValueError("non-finite action value")
    e = np.exp(q - q.max())
    return e / e.sum()


def select_action(q_values, rng: np.random.Generator) -> int:
    """Sample an action index from the softmax policy."""
    probs = softmax_probs(q_values)
    u = rng.random()
    return int(min(np.searchsorted(np.cumsum(probs), u), probs.size - 1))


class QNetwork:
    OBS_PREFIX = "f_o"
    ACT_PREFIX = "f_a"
    HEAD_PREFIX = "g"

    def __init__(self, vocab: Vocab, config: EncoderConfig, rng: np.random.Generator):
        self.vocab = vocab
        self.config = config
        self.mode = config.mode
        self.store = ParamStore()
        d = config.hidden_dim
        if self.mode == "hash":
            self.f_o = self.f_a = None
            self.hash_encoder = HashEncoder(d)
        else:
            self.f_o = TextEncoder(self.store, self.OBS_PREFIX, vocab.size,
                                   config.embed_dim, d, rng)
            self.f_a = TextEncoder(self.store, self.ACT_PREFIX, vocab.size,
                                   config.embed_dim, d, rng)
            self.hash_encoder = None
        nn.register_linear(self.store, f"{self.HEAD_PREFIX}.l1", 2 * d, d, rng)
        nn.register_linear(self.store, f"{self.HEAD_PREFIX}.l2", d, 1, rng)

    # -- encoding ---------------------------------------------------------

    def encoders_trainable(self) -> bool:
        if self.mode == "hash":
            return False
        return self.store.is_trainable(f"{self.OBS_PREFIX}.emb")

    def obs_reprs_plain(self, seqs) -> np.ndarray:
        if self.mode == "hash":
            return self.hash_encoder.encode_batch(seqs)
        return self.f_o.encode_plain(seqs)

    def act_reprs_plain(self, seqs) -> np.ndarray:
        if self.mode == "hash":
            return self.hash_encoder.encode_batch(seqs)
        return self.f_a.encode_plain(seqs)

    def obs_reprs_value(self, seqs) -> nn.Value:
        if self.mode == "hash" or not self.encoders_trainable():
            return nn.constant(self.obs_reprs_plain(seqs))
        return self.f_o.encode_value(seqs)

    def act_reprs_value(self, seqs) -> nn.Value:
        if self.mode == "hash" or not self.encoders_trainable():
            return nn.constant(self.act_reprs_plain(seqs))
        return self.f_a.encode_value(seqs)

    def encode_text(self, seq, which: str) -> np.ndarray:
        """Single-sequence encoder surface; rejects the fixed hash mode."""
        if self.mode == "hash":
            raise RuntimeError("encode_text is undefined in hash mode; use hash_encode")
        if which == "observation":
            return self.f_o.encode_plain([tuple(seq)])[0]
        if which == "action":
            return self.f_a.encode_plain([tuple(seq)])[0]
        raise ValueError(f"which must be 'observation' or 'action', got {which!r}")

    # -- scoring ----------------------------------------------------------

    def _head_weights(self):
        s = self.store
        return (s["g.l1.W"].values, s["g.l1.b"].values,
                s["g.l2.W"].values, s["g.l2.b"].values)

    def q_plain(self, o_reprs: np.ndarray, a_reprs: np.ndarray) -> np.ndarray:
        """Gradient-free Q for row-aligned (N, d) representation pairs."""
        w1, b1, w2, b2 = self._head_weights()
        x = np.concatenate((o_reprs, a_reprs), axis=1)
        hidden = np.maximum(x @ w1 + b1, 0.0)
        return (hidden @ w2 + b2)[:, 0]

    def q_values_tape(self, o_rows: nn.Value, a_rows: nn.Value) -> nn.Value:
        s = self.store
        x = nn.concat_cols(o_rows, a_rows)
        hidden = nn.relu(nn.linear(x, nn.param(s, "g.l1.W"), nn.param(s, "g.l1.b")))
        return nn.flatten1(nn.linear(hidden, nn.param(s, "g.l2.W"), nn.param(s, "g.l2.b")))

    def q_value(self, o_repr: np.ndarray, a_repr: np.ndarray) -> float:
        """Q for a single representation pair."""
        return float(self.q_plain(o_repr[None, :], a_repr[None, :])[0])

    def action_q_values(self, obs_seq, act_seqs) -> np.ndarray:
        """Q(o, a) for one observation against each candidate action."""
        o = self.obs_reprs_plain([tuple(obs_seq)])
        a = self.act_reprs_plain([tuple(s) for s in act_seqs])
        o_rows = np.repeat(o, len(act_seqs), axis=0)
        return self.q_plain(o_rows, a)
