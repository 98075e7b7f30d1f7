"""The interactive-fiction simulator: episode state, stepping, valid actions.

Command grammar (1-4 tokens): look | wait | go <dir> | take <obj> |
drop <obj> | <verb> [<obj> [with <obj>]], the last form coming from trigger
patterns.  Trigger constraints are checked against the pre-action state --
the same state valid-action enumeration saw.

Deterministic mode ignores paraphrases and random events entirely; stochastic
mode draws both from per-episode RNG streams (one for events, one for
paraphrase choice, so surface text never perturbs event draws).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..hashing import MASK64, splitmix64_next
from .spec import GameSpec, GameSpecError, Trigger

EPISODE_STEP_LIMIT = 100

MSG_WAIT = "Time passes."
MSG_NOTHING = "Nothing happens."
MSG_EMPTY_HANDS = "You are carrying nothing."


class InvalidActionError(ValueError):
    """An action outside the current valid-action set was stepped."""


@dataclass(frozen=True)
class Observation:
    feedback: str
    look: str
    inventory: str
    location: str


@dataclass(frozen=True)
class StepResult:
    observation: Observation
    reward: int
    done: bool
    valid_actions: list[str]


@dataclass
class GameState:
    spec: GameSpec
    room_id: str
    inventory: set[str] = field(default_factory=set)
    drop_locations: dict[str, str] = field(default_factory=dict)
    flags: set[str] = field(default_factory=set)
    fired: set[int] = field(default_factory=set)
    score: int = 0
    steps: int = 0
    stochastic: bool = False
    seed: int = 0
    para_choice: dict[str, int] = field(default_factory=dict)
    events_rng: np.random.Generator | None = None


def _derive_stream(seed: int, salt: int) -> np.random.Generator:
    mixed, _ = splitmix64_next((seed ^ (salt * 0x9E3779B97F4A7C15)) & MASK64)
    return np.random.Generator(np.random.PCG64(mixed))


def reset(spec: GameSpec, seed: int = 0, stochastic: bool = False
          ) -> tuple[GameState, StepResult]:
    """Start an episode: player in the first room, empty feedback, score 0."""
    flags = set()
    for obj in spec.objects:
        flags.update(obj.flags)
    inventory = {o.name for o in spec.objects if o.location == "inventory"}
    state = GameState(spec=spec, room_id=spec.start_room.id, inventory=inventory,
                      flags=flags, stochastic=stochastic, seed=seed)
    if stochastic:
        state.events_rng = _derive_stream(seed, 1)
        para_rng = _derive_stream(seed, 2)
        for room_id in sorted(spec.paraphrases):
            variants = spec.paraphrases[room_id]
            state.para_choice[room_id] = int(para_rng.integers(len(variants)))
    obs = augment_observation(state, "")
    return state, StepResult(obs, 0, _is_done(state), valid_actions(state))


def _room_look(state: GameState, room_id: str) -> str:
    spec = state.spec
    if state.stochastic and room_id in spec.paraphrases:
        return spec.paraphrases[room_id][state.para_choice[room_id]]
    return spec.room(room_id).description


def _inventory_text(state: GameState) -> str:
    if not state.inventory:
        return MSG_EMPTY_HANDS
    return "You are carrying: " + ", ".join(sorted(state.inventory)) + "."


def augment_observation(state: GameState, feedback: str) -> Observation:
    """Attach look text, inventory listing and the location phrase."""
    room = state.spec.room(state.room_id)
    return Observation(feedback=feedback, look=_room_look(state, state.room_id),
                       inventory=_inventory_text(state), location=room.name)


def _object_location(state: GameState, name: str) -> str | None:
    """Current location of an object: a room id, "inventory", or None."""
    obj = state.spec.object_by_name(name)
    if obj is None:
        return None
    if obj.name in state.inventory:
        return "inventory"
    return state.drop_locations.get(obj.name, obj.location)


def _trigger_satisfiable(state: GameState, trig: Trigger) -> bool:
    if trig.room is not None and trig.room != state.room_id:
        return False
    if not set(trig.requires_flags) <= state.flags:
        return False
    spec = state.spec
    for item in trig.requires_items:
        obj = next(o for o in spec.objects if o.id == item)
        if obj.name not in state.inventory:
            return False
    if len(trig.pattern) >= 2:
        obj = spec.object_by_name(trig.pattern[1])
        if obj is not None and _object_location(state, obj.name) != state.room_id:
            return False
    if len(trig.pattern) == 3:
        inst = spec.object_by_name(trig.pattern[2])
        if inst is not None and inst.name not in state.inventory:
            return False
    return True


def valid_actions(state: GameState) -> list[str]:
    """Every currently admissible command, lexicographically sorted."""
    acts = {"look", "wait"}
    room = state.spec.room(state.room_id)
    for direction in room.exits:
        acts.add(f"go {direction}")
    for obj in state.spec.objects:
        if obj.portable and _object_location(state, obj.name) == state.room_id:
            acts.add(f"take {obj.name}")
    for name in state.inventory:
        acts.add(f"drop {name}")
    for trig in state.spec.triggers:
        if _trigger_satisfiable(state, trig):
            acts.add(trig.action_text())
    return sorted(acts)


def _is_done(state: GameState) -> bool:
    spec = state.spec
    if spec.max_score > 0 and state.score >= spec.max_score:
        return True
    return state.steps >= EPISODE_STEP_LIMIT


def step(state: GameState, action: str) -> StepResult:
    """Apply one command; raises InvalidActionError outside the valid set."""
    if action not in valid_actions(state):
        raise InvalidActionError(f"invalid action {action!r} in room {state.room_id!r}")
    spec = state.spec
    # Trigger matching is decided on the pre-action state.
    matched = [i for i, t in enumerate(spec.triggers)
               if t.action_text() == action and _trigger_satisfiable(state, t)]

    feedback_parts: list[str] = []
    words = action.split()
    if action == "look":
        feedback_parts.append(_room_look(state, state.room_id))
    elif action == "wait":
        feedback_parts.append(MSG_WAIT)
    elif words[0] == "go" and len(words) == 2 and words[1] in spec.room(state.room_id).exits:
        state.room_id = spec.room(state.room_id).exits[words[1]]
        feedback_parts.append(f"You go {words[1]}.")
    elif words[0] == "take" and len(words) == 2 and _object_location(state, words[1]) == state.room_id:
        obj = spec.object_by_name(words[1])
        if obj is not None and obj.portable:
            state.inventory.add(obj.name)
            feedback_parts.append(f"You take the {obj.name}.")
    elif words[0] == "drop" and len(words) == 2 and words[1] in state.inventory:
        state.inventory.discard(words[1])
        state.drop_locations[words[1]] = state.room_id
        feedback_parts.append(f"You drop the {words[1]}.")

    reward = 0
    for i in matched:
        trig = spec.triggers[i]
        if trig.once and i in state.fired:
            continue
        reward += trig.reward
        state.fired.add(i)
        state.flags.update(trig.set_flags)
        state.flags.difference_update(trig.clear_flags)
        if trig.message:
            feedback_parts.append(trig.message)

    state.score += reward
    state.steps += 1

    if state.stochastic and state.events_rng is not None:
        for ev in spec.random_events:
            if state.events_rng.random() < ev.probability:
                if ev.effect_type == "set_flag":
                    state.flags.add(ev.effect_arg)
                elif ev.effect_type == "clear_flag":
                    state.flags.discard(ev.effect_arg)
                elif ev.effect_type == "move_player":
                    state.room_id = ev.effect_arg
                if ev.message:
                    feedback_parts.append(ev.message)

    if not feedback_parts:
        feedback_parts.append(MSG_NOTHING)
    obs = augment_observation(state, " ".join(feedback_parts))
    return StepResult(obs, reward, _is_done(state), valid_actions(state))


def replay_walkthrough(spec: GameSpec) -> int:
    """Replay the walkthrough in deterministic mode; returns the final score."""
    state, _ = reset(spec, seed=0, stochastic=False)
    for i, action in enumerate(spec.walkthrough):
        try:
            step(state, action)
        except InvalidActionError as e:
            raise GameSpecError(f"walkthrough step {i} ({action!r}): {e}") from e
    return state.score


def parse_game_spec(text: str) -> GameSpec:
    """Parse, validate, and (when a walkthrough exists) replay-verify a spec."""
    from .spec import parse_structure
    spec = parse_structure(text)
    if spec.walkthrough:
        score = replay_walkthrough(spec)
        if score != spec.max_score:
            raise GameSpecError(
                f"walkthrough reaches score {score}, expected max_score {spec.max_score}")
    return spec
