"""Experience replay with two-tier reward-biased sampling.

A fraction rho of every batch is drawn uniformly (with replacement) from the
transitions whose stored reward is nonzero, the rest uniformly from the whole
ring; when no reward-bearing transition exists yet, the first tier falls back
to the ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Transition:
    obs_tokens: tuple[int, ...]
    act_tokens: tuple[int, ...]
    reward: float
    next_obs_tokens: tuple[int, ...]
    next_action_tokens: tuple[tuple[int, ...], ...]
    done: bool


class ReplayBuffer:
    def __init__(self, capacity: int = 100_000, priority_fraction: float = 0.5):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        if not 0.0 <= priority_fraction <= 1.0:
            raise ValueError("priority_fraction must be in [0, 1]")
        self.capacity = capacity
        self.priority_fraction = priority_fraction
        self._items: list[Transition] = []
        self._next = 0
        self._reward_positions: list[int] = []
        self._reward_index: dict[int, int] = {}  # ring position -> list slot

    def __len__(self) -> int:
        return len(self._items)

    @property
    def reward_bearing(self) -> int:
        return len(self._reward_positions)

    def _deindex(self, pos: int) -> None:
        slot = self._reward_index.pop(pos, None)
        if slot is None:
            return
        last = self._reward_positions.pop()
        if slot < len(self._reward_positions):
            self._reward_positions[slot] = last
            self._reward_index[last] = slot

    def push(self, t: Transition) -> None:
        pos = self._next
        if len(self._items) < self.capacity:
            self._items.append(t)
        else:
            self._deindex(pos)
            self._items[pos] = t
        self._next = (pos + 1) % self.capacity
        if t.reward != 0.0:
            self._reward_index[pos] = len(self._reward_positions)
            self._reward_positions.append(pos)

    def sample(self, batch: int, rng: np.random.Generator) -> list[Transition]:
        if len(self._items) < batch:
            raise ValueError(f"buffer holds {len(self._items)} < batch {batch}")
        k = math.ceil(self.priority_fraction * batch)
        out: list[Transition] = []
        if k:
            if self._reward_positions:
                picks = rng.integers(0, len(self._reward_positions), size=k)
                out.extend(self._items[self._reward_positions[int(i)]] for i in picks)
            else:
                picks = rng.integers(0, len(self._items), size=k)
                out.extend(self._items[int(i)] for i in picks)
        rest = batch - k
        if rest:
            picks = rng.integers(0, len(self._items), size=rest)
            out.extend(self._items[int(i)] for i in picks)
        return out
