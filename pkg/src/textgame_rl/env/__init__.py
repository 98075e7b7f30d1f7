"""Synthetic interactive-fiction environment."""

from .engine import (EPISODE_STEP_LIMIT, GameState, InvalidActionError,
                     Observation, StepResult, augment_observation,
                     parse_game_spec, replay_walkthrough, reset, step,
                     valid_actions)
from .fixtures import FIXTURE_NAMES, fixture_text, load_fixture
from .spec import (GameObject, GameSpec, GameSpecError, RandomEvent, Room,
                   Trigger)

__all__ = [
    "EPISODE_STEP_LIMIT", "FIXTURE_NAMES", "GameObject", "GameSpec",
    "GameSpecError", "GameState", "InvalidActionError", "Observation",
    "RandomEvent", "Room", "StepResult", "Trigger", "augment_observation",
    "fixture_text", "load_fixture", "parse_game_spec", "replay_walkthrough",
    "reset", "step", "valid_actions",
]
