"""Declarative game specs: typed structure and strict JSON parsing.

A game document is a JSON object with exactly the top-level keys
rooms, objects, triggers, max_score, walkthrough, paraphrases and
random_events (the first room is the start room).  Unknown keys are
rejected at every level, and all cross-references must resolve.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

_WORD = re.compile(r"^[0-9a-z]+$")
_IDENT = re.compile(r"^[0-9a-z_]+$")


class GameSpecError(ValueError):
    """Malformed or inconsistent game document."""


@dataclass(frozen=True)
class Room:
    id: str
    name: str
    description: str
    exits: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class GameObject:
    id: str
    name: str
    portable: bool
    location: str  # room id or "inventory"
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class Trigger:
    pattern: tuple[str, ...]  # (verb,), (verb, object) or (verb, object, instrument)
    room: str | None
    requires_flags: tuple[str, ...]
    requires_items: tuple[str, ...]
    reward: int
    message: str
    once: bool
    set_flags: tuple[str, ...]
    clear_flags: tuple[str, ...]

    def action_text(self) -> str:
        if len(self.pattern) == 1:
            return self.pattern[0]
        if len(self.pattern) == 2:
            return f"{self.pattern[0]} {self.pattern[1]}"
        return f"{self.pattern[0]} {self.pattern[1]} with {self.pattern[2]}"


@dataclass(frozen=True)
class RandomEvent:
    probability: float
    effect_type: str  # "message" | "set_flag" | "clear_flag" | "move_player"
    effect_arg: str | None
    message: str


@dataclass(frozen=True)
class GameSpec:
    rooms: tuple[Room, ...]
    objects: tuple[GameObject, ...]
    triggers: tuple[Trigger, ...]
    max_score: int
    walkthrough: tuple[str, ...]
    paraphrases: dict[str, tuple[str, ...]]
    random_events: tuple[RandomEvent, ...]

    def room(self, room_id: str) -> Room:
        return self._rooms_by_id[room_id]

    @property
    def start_room(self) -> Room:
        return self.rooms[0]

    def object_by_name(self, name: str) -> GameObject | None:
        return self._objects_by_name.get(name)

    def __post_init__(self):
        object.__setattr__(self, "_rooms_by_id", {r.id: r for r in self.rooms})
        object.__setattr__(self, "_objects_by_name", {o.name: o for o in self.objects})


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise GameSpecError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise GameSpecError(f"{where}: missing keys {sorted(missing)}")


def _word(value, where: str) -> str:
    if not isinstance(value, str) or not _WORD.match(value):
        raise GameSpecError(f"{where}: expected a single lowercase word, got {value!r}")
    return value


def _ident(value, where: str) -> str:
    if not isinstance(value, str) or not _IDENT.match(value):
        raise GameSpecError(f"{where}: expected a lowercase identifier, got {value!r}")
    return value


def _str(value, where: str) -> str:
    if not isinstance(value, str):
        raise GameSpecError(f"{where}: expected a string, got {type(value).__name__}")
    return value


def _str_tuple(value, where: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise GameSpecError(f"{where}: expected a list of strings")
    return tuple(value)


def parse_structure(text: str) -> GameSpec:
    """Parse and validate a game document, except for walkthrough replay."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameSpecError(
            f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise GameSpecError("top level must be an object")
    _require_keys(doc, {"rooms", "objects", "triggers", "max_score", "walkthrough",
                        "paraphrases", "random_events"},
                  {"rooms", "max_score"}, "document")

    rooms_raw = doc["rooms"]
    if not isinstance(rooms_raw, list) or not rooms_raw:
        raise GameSpecError("rooms must be a non-empty list")
    rooms = []
    for i, r in enumerate(rooms_raw):
        where = f"rooms[{i}]"
        if not isinstance(r, dict):
            raise GameSpecError(f"{where}: expected an object")
        _require_keys(r, {"id", "name", "description", "exits"},
                      {"id", "name", "description"}, where)
        exits_raw = r.get("exits", {})
        if not isinstance(exits_raw, dict):
            raise GameSpecError(f"{where}.exits: expected an object")
        exits = {_word(d, f"{where}.exits key"): _str(t, f"{where}.exits[{d}]")
                 for d, t in exits_raw.items()}
        rooms.append(Room(id=_ident(r["id"], f"{where}.id"),
                          name=_str(r["name"], f"{where}.name"),
                          description=_str(r["description"], f"{where}.description"),
                          exits=exits))
    room_ids = [r.id for r in rooms]
    if len(set(room_ids)) != len(room_ids):
        raise GameSpecError("duplicate room id")
    room_id_set = set(room_ids)
    for r in rooms:
        for d, target in r.exits.items():
            if target not in room_id_set:
                raise GameSpecError(f"room {r.id!r}: exit {d!r} names unknown room {target!r}")

    objects = []
    for i, o in enumerate(doc.get("objects", [])):
        where = f"objects[{i}]"
        if not isinstance(o, dict):
            raise GameSpecError(f"{where}: expected an object")
        _require_keys(o, {"id", "name", "portable", "location", "flags"},
                      {"id", "name", "portable", "location"}, where)
        loc = _str(o["location"], f"{where}.location")
        if loc != "inventory" and loc not in room_id_set:
            raise GameSpecError(f"{where}: unknown location {loc!r}")
        if not isinstance(o["portable"], bool):
            raise GameSpecError(f"{where}.portable: expected a boolean")
        objects.append(GameObject(id=_ident(o["id"], f"{where}.id"),
                                  name=_word(o["name"], f"{where}.name"),
                                  portable=o["portable"], location=loc,
                                  flags=_str_tuple(o.get("flags", []), f"{where}.flags")))
    obj_ids = [o.id for o in objects]
    obj_names = [o.name for o in objects]
    if len(set(obj_ids)) != len(obj_ids):
        raise GameSpecError("duplicate object id")
    if len(set(obj_names)) != len(obj_names):
        raise GameSpecError("duplicate object name")
    obj_id_set = set(obj_ids)

    triggers = []
    for i, t in enumerate(doc.get("triggers", [])):
        where = f"triggers[{i}]"
        if not isinstance(t, dict):
            raise GameSpecError(f"{where}: expected an object")
        _require_keys(t, {"pattern", "room", "requires_flags", "requires_items",
                          "reward", "message", "once", "set_flags", "clear_flags"},
                      {"pattern", "reward", "message"}, where)
        pattern = tuple(_word(w, f"{where}.pattern") for w in t["pattern"])
        if not 1 <= len(pattern) <= 3:
            raise GameSpecError(f"{where}.pattern: expected 1-3 words")
        room = t.get("room")
        if room is not None and room not in room_id_set:
            raise GameSpecError(f"{where}: unknown room {room!r}")
        items = _str_tuple(t.get("requires_items", []), f"{where}.requires_items")
        for item in items:
            if item not in obj_id_set:
                raise GameSpecError(f"{where}: unknown item {item!r}")
        reward = t["reward"]
        if not isinstance(reward, int) or isinstance(reward, bool):
            raise GameSpecError(f"{where}.reward: expected an integer")
        once = t.get("once", True)
        if not isinstance(once, bool):
            raise GameSpecError(f"{where}.once: expected a boolean")
        triggers.append(Trigger(
            pattern=pattern, room=room,
            requires_flags=_str_tuple(t.get("requires_flags", []), f"{where}.requires_flags"),
            requires_items=items, reward=reward,
            message=_str(t["message"], f"{where}.message"), once=once,
            set_flags=_str_tuple(t.get("set_flags", []), f"{where}.set_flags"),
            clear_flags=_str_tuple(t.get("clear_flags", []), f"{where}.clear_flags")))

    max_score = doc["max_score"]
    if not isinstance(max_score, int) or isinstance(max_score, bool) or max_score < 0:
        raise GameSpecError("max_score must be a non-negative integer")

    walkthrough = _str_tuple(doc.get("walkthrough", []), "walkthrough")

    paraphrases: dict[str, tuple[str, ...]] = {}
    para_raw = doc.get("paraphrases", {})
    if not isinstance(para_raw, dict):
        raise GameSpecError("paraphrases must be an object")
    rooms_by_id = {r.id: r for r in rooms}
    for key, variants in para_raw.items():
        if key not in room_id_set:
            raise GameSpecError(f"paraphrases: unknown room {key!r}")
        vs = _str_tuple(variants, f"paraphrases[{key}]")
        if not vs:
            raise GameSpecError(f"paraphrases[{key}]: empty variant list")
        if vs[0] != rooms_by_id[key].description:
            raise GameSpecError(
                f"paraphrases[{key}]: first variant must equal the room description")
        paraphrases[key] = vs

    events = []
    for i, ev in enumerate(doc.get("random_events", [])):
        where = f"random_events[{i}]"
        if not isinstance(ev, dict):
            raise GameSpecError(f"{where}: expected an object")
        _require_keys(ev, {"probability", "effect", "message"},
                      {"probability", "effect", "message"}, where)
        prob = ev["probability"]
        if not isinstance(prob, (int, float)) or isinstance(prob, bool) or not 0.0 <= prob <= 1.0:
            raise GameSpecError(f"{where}.probability: expected a number in [0, 1]")
        effect = ev["effect"]
        if not isinstance(effect, dict) or "type" not in effect:
            raise GameSpecError(f"{where}.effect: expected an object with a type")
        etype = effect["type"]
        arg: str | None = None
        if etype == "message":
            _require_keys(effect, {"type"}, {"type"}, f"{where}.effect")
        elif etype in ("set_flag", "clear_flag"):
            _require_keys(effect, {"type", "flag"}, {"type", "flag"}, f"{where}.effect")
            arg = _str(effect["flag"], f"{where}.effect.flag")
        elif etype == "move_player":
            _require_keys(effect, {"type", "room"}, {"type", "room"}, f"{where}.effect")
            arg = _str(effect["room"], f"{where}.effect.room")
            if arg not in room_id_set:
                raise GameSpecError(f"{where}.effect: unknown room {arg!r}")
        else:
            raise GameSpecError(f"{where}.effect: unknown type {etype!r}")
        events.append(RandomEvent(probability=float(prob), effect_type=etype,
                                  effect_arg=arg, message=_str(ev["message"], f"{where}.message")))

    return GameSpec(rooms=tuple(rooms), objects=tuple(objects), triggers=tuple(triggers),
                    max_score=max_score, walkthrough=walkthrough,
                    paraphrases=paraphrases, random_events=tuple(events))
