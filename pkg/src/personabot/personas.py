"""Robot persona registry: Big Five trait profiles and the dialogue styles they imply."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import DataFileError, UnknownRobotError
from .memory import ROBOTS, normalize_value

TRAIT_NAMES = (
    "extraversion",
    "agreeableness",
    "neuroticism",
    "conscientiousness",
    "openness",
)

# A trait at or above this weight is strong enough to shape how the persona
# talks, not only what it recalls.
HIGH_TRAIT = 0.7


@dataclass(frozen=True)
class PersonaProfile:
    robot_id: str
    extraversion: float
    agreeableness: float
    neuroticism: float
    conscientiousness: float
    openness: float
    motto: str
    preferences: frozenset[tuple[str, str]]


@dataclass(frozen=True)
class StyleParams:
    """Conversation-style switches, one per strong trait."""

    detail_probing: bool
    motivation_probing: bool
    self_disclosure: bool
    preference_mirroring: bool
    hedged_recall: bool


def style_params(profile: PersonaProfile) -> StyleParams:
    return StyleParams(
        detail_probing=profile.conscientiousness >= HIGH_TRAIT,
        motivation_probing=profile.openness >= HIGH_TRAIT,
        self_disclosure=profile.extraversion >= HIGH_TRAIT,
        preference_mirroring=profile.agreeableness >= HIGH_TRAIT,
        hedged_recall=profile.neuroticism >= HIGH_TRAIT,
    )


def _parse_profile(raw: dict) -> PersonaProfile:
    try:
        robot_id = raw["robot_id"]
        motto = raw["motto"]
        traits = {name: float(raw[name]) for name in TRAIT_NAMES}
        preferences = frozenset(
            (normalize_value(pref["category"]), normalize_value(pref["value"]))
            for pref in raw.get("preferences", [])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFileError(f"malformed persona entry: {exc}") from exc
    for name, weight in traits.items():
        if not 0.0 <= weight <= 1.0:
            raise DataFileError(f"{robot_id}: trait {name}={weight} outside [0, 1]")
    if not motto.strip():
        raise DataFileError(f"{robot_id}: motto is empty")
    return PersonaProfile(robot_id=robot_id, motto=motto, preferences=preferences, **traits)


def load_personas(path: Path | None = None) -> dict[str, PersonaProfile]:
    """Load a personas file; defaults to the bundled one."""
    if path is None:
        text = resources.files("personabot.data").joinpath("personas.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        entries = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFileError(f"personas file is not valid JSON: {exc}") from exc
    if not isinstance(entries, list):
        raise DataFileError("personas file must hold a list of profiles")
    profiles = {}
    for raw in entries:
        profile = _parse_profile(raw)
        if profile.robot_id in profiles:
            raise DataFileError(f"duplicate persona {profile.robot_id}")
        profiles[profile.robot_id] = profile
    return profiles


@lru_cache(maxsize=1)
def builtin_personas() -> dict[str, PersonaProfile]:
    profiles = load_personas()
    if set(profiles) != set(ROBOTS):
        raise DataFileError(f"bundled personas must be exactly {ROBOTS}, got {sorted(profiles)}")
    return profiles


def get_persona(robot_id: str) -> PersonaProfile:
    try:
        return builtin_personas()[robot_id]
    except KeyError:
        raise UnknownRobotError(
            f"unknown robot {robot_id!r}; expected one of {ROBOTS}"
        ) from None
