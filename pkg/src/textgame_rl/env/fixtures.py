"""Bundled game fixtures, loadable by short name."""

from __future__ import annotations

from importlib import resources

from .engine import parse_game_spec
from .spec import GameSpec

FIXTURE_NAMES = ("treasure_hunt", "treasure_hunt_b", "alias_maze", "bandit1")


def fixture_text(name: str) -> str:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; have {FIXTURE_NAMES}")
    return (resources.files(__package__) / "fixtures" / f"{name}.json").read_text("utf-8")


def load_fixture(name: str) -> GameSpec:
    return parse_game_spec(fixture_text(name))
