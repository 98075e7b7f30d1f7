"""Text front ends: tokenizer, shared vocabulary, trainable GRU encoders,
and observation composition for the base / min-ob / hash input modes."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import nn
from .nn import ParamStore

PAD, UNK, BOS, EOS, SEP = 0, 1, 2, 3, 4
# "sep" doubles as the printable separator word so it survives tokenization.
RESERVED_TOKENS = ("<pad>", "<unk>", "<bos>", "<eos>", "sep")
SEP_MARK = "[SEP]"

_WORD_RE = re.compile(r"[0-9a-z]+")

MODES = ("base", "min-ob", "hash")


class EncoderModeError(RuntimeError):
    """Raised when a trainable-encoder call reaches the fixed hash mode."""


@dataclass(frozen=True)
class EncoderConfig:
    embed_dim: int = 64
    hidden_dim: int = 128
    mode: str = "base"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.hidden_dim % 2 != 0:
            raise ValueError("hidden_dim must be even (Box-Muller pairing)")


class Vocab:
    """Frozen token -> id map with the five reserved ids up front."""

    def __init__(self, tokens):
        words = sorted({t for t in tokens if t not in RESERVED_TOKENS})
        self._id_to_token = list(RESERVED_TOKENS) + words
        self._token_to_id = {t: i for i, t in enumerate(self._id_to_token)}

    @property
    def size(self) -> int:
        return len(self._id_to_token)

    def lookup(self, token: str) -> int:
        return self._token_to_id.get(token, UNK)

    def token(self, idx: int) -> str:
        return self._id_to_token[idx]

    def tokens(self) -> list[str]:
        """Non-reserved tokens in id order (for checkpoint round trips)."""
        return self._id_to_token[len(RESERVED_TOKENS):]


def words_of(text: str) -> list[str]:
    """Lowercased alphanumeric word list of a text."""
    return _WORD_RE.findall(text.lower())


def tokenize(text: str, vocab: Vocab) -> tuple[int, ...]:
    """Lowercase, split on non-alphanumeric runs, map OOV to UNK; empty -> (PAD,)."""
    ids = tuple(vocab.lookup(w) for w in words_of(text))
    return ids if ids else (PAD,)


def compose_observation_text(obs, mode: str) -> str:
    """Canonical text form of an observation under an input mode."""
    if mode == "min-ob":
        return obs.location
    return f"{obs.feedback} {SEP_MARK} {obs.look} {SEP_MARK} {obs.inventory}"


def observation_token_ids(obs, mode: str, vocab: Vocab) -> tuple[int, ...]:
    """Token ids of the composed observation; empty segments are PAD-backed."""
    if mode == "min-ob":
        return tokenize(obs.location, vocab)
    return (tokenize(obs.feedback, vocab) + (SEP,)
            + tokenize(obs.look, vocab) + (SEP,)
            + tokenize(obs.inventory, vocab))


def pad_time_major(seqs) -> tuple[np.ndarray, np.ndarray]:
    """Pack token sequences into a PAD-padded (T, B) id block plus lengths."""
    if not seqs:
        raise ValueError("empty batch")
    lengths = np.array([len(s) for s in seqs], dtype=np.int64)
    if lengths.min() < 1:
        raise ValueError("sequences must be non-empty (PAD-backed)")
    T = int(lengths.max())
    ids = np.full((T, len(seqs)), PAD, dtype=np.int64)
    for b, s in enumerate(seqs):
        ids[:len(s), b] = s
    return ids, lengths


class TextEncoder:
    """Trainable embedding + GRU text encoder (one of f_o / f_a)."""

    def __init__(self, store: ParamStore, prefix: str, vocab_size: int,
                 embed_dim: int, hidden_dim: int, rng: np.random.Generator):
        self.store = store
        self.prefix = prefix
        self.hidden_dim = hidden_dim
        nn.register_embedding(store, f"{prefix}.emb", vocab_size, embed_dim, rng)
        nn.register_gru(store, f"{prefix}.gru", embed_dim, hidden_dim, rng)

    def _gru_param_values(self):
        s, p = self.store, self.prefix
        pz = (nn.param(s, f"{p}.gru.W_z"), nn.param(s, f"{p}.gru.U_z"), nn.param(s, f"{p}.gru.b_z"))
        pr = (nn.param(s, f"{p}.gru.W_r"), nn.param(s, f"{p}.gru.U_r"), nn.param(s, f"{p}.gru.b_r"))
        ph = (nn.param(s, f"{p}.gru.W_h"), nn.param(s, f"{p}.gru.U_h"), nn.param(s, f"{p}.gru.b_h"))
        return pz, pr, ph

    def encode_value(self, seqs) -> nn.Value:
        """Tape-recorded batch encoding -> Value of shape (B, H)."""
        ids, lengths = pad_time_major(seqs)
        emb = nn.param(self.store, f"{self.prefix}.emb")
        x = nn.lookup(emb, ids)
        pz, pr, ph = self._gru_param_values()
        return nn.gru_sequence(x, lengths, pz, pr, ph)

    def encode_plain(self, seqs) -> np.ndarray:
        """Gradient-free batch encoding -> (B, H) array."""
        from .backend import kernels as K
        ids, lengths = pad_time_major(seqs)
        emb = self.store[f"{self.prefix}.emb"].values
        x = np.ascontiguousarray(emb[ids])
        pz, pr, ph = self._gru_param_values()
        from .nn.autodiff import _stack_gru
        Hs, _, _, _ = K.gru_seq_forward(x, lengths, *_stack_gru(pz, pr, ph))
        return Hs[-1].copy()

    def embedding_tensor(self):
        return self.store[f"{self.prefix}.emb"]
