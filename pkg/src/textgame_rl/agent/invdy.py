"""Inverse-dynamics regularizer and intrinsic exploration reward.

Two auxiliary decoding losses share one GRU decoder: predicting the action
text from (current, next) observation representations through a bridge MLP,
and reconstructing the action text from its own encoding.  Both decode back
to tokens; nothing ever penalizes representation-space distance directly
(that would collapse text representations together).  The decoder shares
its token embeddings with the action encoder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import nn
from ..backend import kernels as K
from ..encoders import EOS, pad_time_major
from ..nn import ParamStore
from ..nn.autodiff import _stack_gru
from .qnet import QNetwork


@dataclass(frozen=True)
class LossWeights:
    lambda_inv: float = 1.0
    lambda_dec: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.lambda_inv < 0 or self.lambda_dec < 0 or self.beta < 0:
            raise ValueError("loss weights must be non-negative")


def combined_loss(td: float, inv: float, dec: float, w: LossWeights) -> float:
    """Exact weighted sum: td + lambda1 * inv + lambda2 * dec."""
    return td + w.lambda_inv * inv + w.lambda_dec * dec


def action_decode_target(act_tokens) -> tuple[int, ...]:
    """Decoder target for an action: its token ids terminated by EOS."""
    return tuple(act_tokens) + (EOS,)


class InvDynHead:
    """Bridge MLP g_inv plus action decoder, parameterized in their own store."""

    GINV = "g_inv"
    DEC = "d_dec"

    def __init__(self, qnet: QNetwork, rng: np.random.Generator):
        if qnet.mode != "base":
            raise ValueError("the inverse-dynamics head requires base mode")
        self.qnet = qnet
        self.store = ParamStore()  # theta, distinct from the Q-network's phi
        d = qnet.config.hidden_dim
        e = qnet.config.embed_dim
        v = qnet.vocab.size
        nn.register_linear(self.store, f"{self.GINV}.l1", 2 * d, d, rng)
        nn.register_linear(self.store, f"{self.GINV}.l2", d, d, rng)
        nn.register_gru(self.store, f"{self.DEC}.gru", e, d, rng)
        self.store.add(f"{self.DEC}.proj.W", nn.init_matrix(rng, (d, v)))
        self.store.add(f"{self.DEC}.proj.b", np.zeros(v))

    # -- shared pieces ------------------------------------------------------

    def _dec_param_values(self):
        s = self.store
        pz = (nn.param(s, "d_dec.gru.W_z"), nn.param(s, "d_dec.gru.U_z"), nn.param(s, "d_dec.gru.b_z"))
        pr = (nn.param(s, "d_dec.gru.W_r"), nn.param(s, "d_dec.gru.U_r"), nn.param(s, "d_dec.gru.b_r"))
        ph = (nn.param(s, "d_dec.gru.W_h"), nn.param(s, "d_dec.gru.U_h"), nn.param(s, "d_dec.gru.b_h"))
        return pz, pr, ph

    def _dec_stacked_plain(self):
        return _stack_gru(*self._dec_param_values())

    def g_inv_value(self, o_rows: nn.Value, o2_rows: nn.Value) -> nn.Value:
        s = self.store
        x = nn.concat_cols(o_rows, o2_rows)
        h = nn.relu(nn.linear(x, nn.param(s, "g_inv.l1.W"), nn.param(s, "g_inv.l1.b")))
        return nn.linear(h, nn.param(s, "g_inv.l2.W"), nn.param(s, "g_inv.l2.b"))

    def g_inv_plain(self, o_rows: np.ndarray, o2_rows: np.ndarray) -> np.ndarray:
        s = self.store
        x = np.concatenate((o_rows, o2_rows), axis=1)
        h = np.maximum(x @ s["g_inv.l1.W"].values + s["g_inv.l1.b"].values, 0.0)
        return h @ s["g_inv.l2.W"].values + s["g_inv.l2.b"].values

    def decode_logprob_value(self, h0: nn.Value, targets) -> nn.Value:
        """Tape decode: per-row log p(target | h0), shape (B,)."""
        ids, lengths = pad_time_major(targets)
        emb = nn.param(self.qnet.store, f"{self.qnet.ACT_PREFIX}.emb")
        pz, pr, ph = self._dec_param_values()
        from ..encoders import BOS
        return nn.gru_decode(emb, h0, ids, lengths, pz, pr, ph,
                             nn.param(self.store, "d_dec.proj.W"),
                             nn.param(self.store, "d_dec.proj.b"), BOS)

    def decode_logprob_plain(self, h0: np.ndarray, targets) -> np.ndarray:
        ids, lengths = pad_time_major(targets)
        emb = self.qnet.store[f"{self.qnet.ACT_PREFIX}.emb"].values
        from ..encoders import BOS
        logp, *_ = K.gru_decode_forward(
            emb, ids, lengths, np.ascontiguousarray(h0),
            *self._dec_stacked_plain(),
            np.ascontiguousarray(self.store["d_dec.proj.W"].values),
            np.ascontiguousarray(self.store["d_dec.proj.b"].values), BOS)
        return logp

    # -- losses ---------------------------------------------------------------

    def inv_loss_rows_plain(self, o_reprs, o2_reprs, actions) -> np.ndarray:
        """Per-row inverse-dynamics loss (no gradients)."""
        h0 = self.g_inv_plain(np.atleast_2d(o_reprs), np.atleast_2d(o2_reprs))
        targets = [action_decode_target(a) for a in actions]
        return -self.decode_logprob_plain(h0, targets)

    def dec_loss_rows_plain(self, a_reprs, actions) -> np.ndarray:
        """Per-row action-reconstruction loss (no gradients)."""
        targets = [action_decode_target(a) for a in actions]
        return -self.decode_logprob_plain(np.atleast_2d(a_reprs), targets)

    def intrinsic_reward(self, obs_tokens, next_obs_tokens, act_tokens) -> float:
        """Exploration bonus: the current inverse-dynamics loss, evaluated only."""
        o = self.qnet.obs_reprs_plain([tuple(obs_tokens), tuple(next_obs_tokens)])
        return float(self.inv_loss_rows_plain(o[0:1], o[1:2], [tuple(act_tokens)])[0])


def inv_loss(o_repr, o2_repr, act_tokens, head: InvDynHead) -> float:
    """Inverse-dynamics loss for a single transition's representations."""
    return float(head.inv_loss_rows_plain(np.atleast_2d(o_repr), np.atleast_2d(o2_repr),
                                          [tuple(act_tokens)])[0])


def dec_loss(a_repr, act_tokens, head: InvDynHead) -> float:
    """Action-reconstruction loss for a single action representation."""
    return float(head.dec_loss_rows_plain(np.atleast_2d(a_repr), [tuple(act_tokens)])[0])
