"""DRRN training: config, TD objective, and the interleaved env/update loop.

The n parallel environments are stepped round-robin, one train step per env
step after warmup.  Within a train step every distinct text is encoded once
and gathered back to batch rows; bootstrap targets are computed gradient-free
from the online network (the max term is a stop-gradient, no target network).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import nn
from ..encoders import (MODES, EncoderConfig, Vocab, compose_observation_text,
                        observation_token_ids, tokenize, words_of)
from ..env import engine
from ..env.spec import GameSpec
from ..hashing import MASK64, splitmix64_next
from ..metrics import final_score
from ..nn import AdamState, adam_step
from .invdy import InvDynHead, action_decode_target
from .qnet import QNetwork, select_action
from .replay import ReplayBuffer, Transition

VARIANTS = ("base", "min-ob", "hash", "inv-dy")


@dataclass(frozen=True)
class TrainConfig:
    gamma: float = 0.9
    batch: int = 64
    num_envs: int = 8
    total_steps: int = 100_000
    warmup: int = 500
    updates_per_env_step: int = 1
    seed: int = 0
    mode: str = "base"
    invdy: bool = False
    lambda_inv: float = 1.0
    lambda_dec: float = 1.0
    intrinsic_beta: float = 1.0
    replay_capacity: int = 100_000
    priority_fraction: float = 0.5
    lr: float = 1e-4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    embed_dim: int = 64
    hidden_dim: int = 128
    stochastic: bool = False

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")
        if self.lambda_inv < 0 or self.lambda_dec < 0 or self.intrinsic_beta < 0:
            raise ValueError("loss weights must be non-negative")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.invdy and self.mode != "base":
            raise ValueError("inverse dynamics is only defined for base mode")
        if self.batch < 1 or self.num_envs < 1 or self.total_steps < 0:
            raise ValueError("batch, num_envs must be >= 1 and total_steps >= 0")
        if self.hidden_dim % 2 != 0:
            raise ValueError("hidden_dim must be even")

    @property
    def variant(self) -> str:
        if self.invdy:
            return "inv-dy"
        return self.mode

    def encoder_config(self) -> EncoderConfig:
        return EncoderConfig(embed_dim=self.embed_dim, hidden_dim=self.hidden_dim,
                             mode=self.mode)


def config_for_variant(variant: str, **overrides) -> TrainConfig:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if variant == "inv-dy":
        return TrainConfig(mode="base", invdy=True, **overrides)
    return TrainConfig(mode=variant, invdy=False, **overrides)


def build_vocab(spec: GameSpec) -> Vocab:
    """One shared vocabulary over every text the game or engine can emit."""
    texts: list[str] = ["look", "wait", engine.MSG_WAIT, engine.MSG_NOTHING,
                        engine.MSG_EMPTY_HANDS, "You are carrying:"]
    for r in spec.rooms:
        texts.extend((r.name, r.description))
        for d in r.exits:
            texts.append(f"You go {d}.")
    for variants in spec.paraphrases.values():
        texts.extend(variants)
    for o in spec.objects:
        texts.extend((o.name, f"You take the {o.name}.", f"You drop the {o.name}."))
    for t in spec.triggers:
        texts.extend((t.action_text(), t.message))
    for ev in spec.random_events:
        texts.append(ev.message)
    words: set[str] = set()
    for t in texts:
        words.update(words_of(t))
    return Vocab(words)


def _mix_seed(*parts: int) -> int:
    state = 0x5DEECE66D
    for p in parts:
        state, _ = splitmix64_next((state ^ (p & MASK64)) & MASK64)
    return state


def _unique(seqs: list[tuple[int, ...]]) -> tuple[list[tuple[int, ...]], np.ndarray]:
    index: dict[tuple[int, ...], int] = {}
    inverse = np.empty(len(seqs), dtype=np.int64)
    for i, s in enumerate(seqs):
        inverse[i] = index.setdefault(s, len(index))
    return list(index), inverse


def _build_td(batch: list[Transition], qnet: QNetwork, gamma: float,
              o2_on_tape: bool) -> dict:
    """TD loss on the tape plus the shared pieces a train step reuses."""
    obs_keys = [t.obs_tokens for t in batch]
    act_keys = [t.act_tokens for t in batch]
    next_keys = [t.next_obs_tokens for t in batch]
    uo, inv_o = _unique(obs_keys)
    ua, inv_a = _unique(act_keys)
    uo2, inv_o2 = _unique(next_keys)

    if o2_on_tape:
        o2_unique_vals = qnet.obs_reprs_value(uo2)
        o2_plain = o2_unique_vals.data
    else:
        o2_unique_vals = None
        o2_plain = qnet.obs_reprs_plain(uo2)

    # Bootstrap term: max_a' Q(o', a') over the stored valid actions, computed
    # without gradients and dropped entirely on done transitions.
    cand_keys: list[tuple[int, ...]] = []
    cand_obs_rows: list[int] = []
    offsets = [0]
    for j, t in enumerate(batch):
        if not t.done:
            for a in t.next_action_tokens:
                cand_keys.append(a)
                cand_obs_rows.append(int(inv_o2[j]))
        offsets.append(len(cand_keys))
    if cand_keys:
        uc, inv_c = _unique(cand_keys)
        c_reprs = qnet.act_reprs_plain(uc)
        q_next = qnet.q_plain(o2_plain[cand_obs_rows], c_reprs[inv_c])
    targets = np.empty(len(batch))
    for j, t in enumerate(batch):
        lo, hi = offsets[j], offsets[j + 1]
        boot = float(q_next[lo:hi].max()) if hi > lo else 0.0
        targets[j] = t.reward + gamma * boot

    o_unique_vals = qnet.obs_reprs_value(uo)
    a_unique_vals = qnet.act_reprs_value(ua)
    o_rows = nn.gather_rows(o_unique_vals, inv_o)
    a_rows = nn.gather_rows(a_unique_vals, inv_a)
    q_sa = qnet.q_values_tape(o_rows, a_rows)
    residual = nn.sub(nn.constant(targets), q_sa)
    td = nn.mean(nn.square(residual))
    return {"td": td, "targets": targets, "o_rows": o_rows, "a_rows": a_rows,
            "o2_unique_vals": o2_unique_vals, "inv_o2": inv_o2,
            "act_keys": act_keys}


def td_loss(batch: list[Transition], qnet: QNetwork, gamma: float) -> nn.Value:
    """Mean squared TD error of a batch (bootstrap from the online network)."""
    if not batch:
        raise ValueError("empty batch")
    return _build_td(batch, qnet, gamma, o2_on_tape=False)["td"]


def train_step(qnet: QNetwork, head: InvDynHead | None, buf: ReplayBuffer,
               config: TrainConfig, adam_phi: AdamState,
               adam_theta: AdamState | None, rng: np.random.Generator) -> dict:
    """Sample a batch, minimize td (+ weighted decoding losses), Adam-update."""
    batch = buf.sample(config.batch, rng)
    parts = _build_td(batch, qnet, config.gamma, o2_on_tape=head is not None)
    td = parts["td"]
    losses = {"td": float(td.data), "inv": 0.0, "dec": 0.0}
    total = td
    if head is not None:
        o2_rows = nn.gather_rows(parts["o2_unique_vals"], parts["inv_o2"])
        targets = [action_decode_target(k) for k in parts["act_keys"]]
        h0 = head.g_inv_value(parts["o_rows"], o2_rows)
        inv = nn.scale(nn.mean(head.decode_logprob_value(h0, targets)), -1.0)
        dec = nn.scale(nn.mean(head.decode_logprob_value(parts["a_rows"], targets)), -1.0)
        losses["inv"] = float(inv.data)
        losses["dec"] = float(dec.data)
        total = nn.add(td, nn.add(nn.scale(inv, config.lambda_inv),
                                  nn.scale(dec, config.lambda_dec)))
    nn.backward(total)
    adam_step(qnet.store, adam_phi)
    if head is not None:
        adam_step(head.store, adam_theta)
    return losses


@dataclass
class TrainResult:
    config: TrainConfig
    vocab: Vocab
    qnet: QNetwork
    invdy_head: InvDynHead | None
    episode_scores: list[int]
    episode_records: list[dict]
    rplus_trace: list[float]
    seen_texts: set[str]
    max_score_seen: int

    @property
    def final_score(self) -> float:
        return final_score(self.episode_scores)


class _EnvSlot:
    __slots__ = ("index", "episode", "state", "obs_tokens", "obs_text",
                 "valid_texts", "act_seqs")

    def __init__(self, index: int):
        self.index = index
        self.episode = 0


def run_training(spec: GameSpec, config: TrainConfig,
                 qnet: QNetwork | None = None,
                 vocab: Vocab | None = None) -> TrainResult:
    """Train on one game; returns the trained network and the episode log."""
    if vocab is None:
        vocab = build_vocab(spec)
    init_rng = np.random.default_rng(_mix_seed(config.seed, 0))
    if qnet is None:
        qnet = QNetwork(vocab, config.encoder_config(), init_rng)
    head = InvDynHead(qnet, init_rng) if config.invdy else None
    action_rng = np.random.default_rng(_mix_seed(config.seed, 1))
    replay_rng = np.random.default_rng(_mix_seed(config.seed, 2))
    adam_phi = AdamState(lr=config.lr, beta1=config.adam_beta1,
                         beta2=config.adam_beta2, eps=config.adam_eps)
    adam_theta = AdamState(lr=config.lr, beta1=config.adam_beta1,
                           beta2=config.adam_beta2, eps=config.adam_eps) if head else None
    buf = ReplayBuffer(config.replay_capacity, config.priority_fraction)

    episode_scores: list[int] = []
    episode_records: list[dict] = []
    rplus_trace: list[float] = []
    seen_texts: set[str] = set()
    max_seen = 0
    loss_sums = {"td": 0.0, "inv": 0.0, "dec": 0.0}
    rplus_sum = 0.0
    since_record = 0
    rplus_count = 0

    def _observe(slot: _EnvSlot, result: engine.StepResult) -> None:
        obs = result.observation
        slot.obs_tokens = observation_token_ids(obs, config.mode, vocab)
        slot.obs_text = compose_observation_text(obs, config.mode)
        slot.valid_texts = list(result.valid_actions)
        slot.act_seqs = [tokenize(a, vocab) for a in slot.valid_texts]
        seen_texts.add(slot.obs_text)

    def _reset_slot(slot: _EnvSlot) -> None:
        episode_seed = _mix_seed(config.seed, 3, slot.index, slot.episode)
        slot.state, result = engine.reset(spec, episode_seed, config.stochastic)
        _observe(slot, result)

    slots = [_EnvSlot(i) for i in range(config.num_envs)]
    for slot in slots:
        _reset_slot(slot)

    for global_step in range(1, config.total_steps + 1):
        slot = slots[(global_step - 1) % config.num_envs]
        q = qnet.action_q_values(slot.obs_tokens, slot.act_seqs)
        choice = select_action(q, action_rng)
        result = engine.step(slot.state, slot.valid_texts[choice])

        act_tokens = slot.act_seqs[choice]
        prev_obs_tokens = slot.obs_tokens
        next_obs = result.observation
        next_tokens = observation_token_ids(next_obs, config.mode, vocab)
        reward = float(result.reward)
        if head is not None:
            rplus = head.intrinsic_reward(prev_obs_tokens, next_tokens, act_tokens)
            rplus_trace.append(rplus)
            rplus_sum += rplus
            rplus_count += 1
            reward += config.intrinsic_beta * rplus
        buf.push(Transition(prev_obs_tokens, act_tokens, reward, next_tokens,
                            tuple(tokenize(a, vocab) for a in result.valid_actions),
                            result.done))
        max_seen = max(max_seen, slot.state.score)

        if result.done:
            episode_scores.append(slot.state.score)
            n = max(since_record, 1)
            episode_records.append({
                "step": global_step, "env": slot.index, "episode": slot.episode,
                "score": slot.state.score,
                "td": loss_sums["td"] / n if since_record else 0.0,
                "inv": loss_sums["inv"] / n if since_record else 0.0,
                "dec": loss_sums["dec"] / n if since_record else 0.0,
                "rplus": rplus_sum / rplus_count if rplus_count else 0.0,
            })
            loss_sums = {"td": 0.0, "inv": 0.0, "dec": 0.0}
            since_record = 0
            rplus_sum = 0.0
            rplus_count = 0
            slot.episode += 1
            _reset_slot(slot)
        else:
            _observe(slot, result)

        if len(buf) >= max(config.warmup, config.batch):
            for _ in range(config.updates_per_env_step):
                losses = train_step(qnet, head, buf, config, adam_phi,
                                    adam_theta, replay_rng)
                for k in loss_sums:
                    loss_sums[k] += losses[k]
                since_record += 1

    return TrainResult(config=config, vocab=vocab, qnet=qnet, invdy_head=head,
                       episode_scores=episode_scores, episode_records=episode_records,
                       rplus_trace=rplus_trace, seen_texts=seen_texts,
                       max_score_seen=max_seen)
