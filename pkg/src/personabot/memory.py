"""Core user-memory formalization.

A user model is the collection of what one robot knows about one user: each
entry pairs a property key with a value and the probability that this
particular robot will be able to retrieve it in a later session. The
probability depends only on the robot and the property family (and, for
emotions, on the observed valence), never on the concrete value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from .errors import (
    EmptyValueError,
    InvalidObservationError,
    MissingValenceError,
    SpuriousValenceError,
    UnknownRobotError,
)

if TYPE_CHECKING:
    from .personas import PersonaProfile

ROBOTS = ("RoboTech", "SunnyBot", "MindStorm")


class PropertyFamily(str, Enum):
    USERNAME = "username"
    PERSONAL = "personal"
    TOPIC = "topic"
    INTEREST = "interest"
    FAVOURITE = "favourite"
    SHARED_FAVOURITE = "sharedFavourite"
    EMOTION = "emotion"
    ATTIRE = "attire"


# Families that carry a parameter ("profession", "film", "color", ...).
PARAMETERIZED_FAMILIES = frozenset(
    {
        PropertyFamily.PERSONAL,
        PropertyFamily.INTEREST,
        PropertyFamily.FAVOURITE,
        PropertyFamily.SHARED_FAVOURITE,
        PropertyFamily.ATTIRE,
    }
)

FAMILY_ORDER = tuple(PropertyFamily)


class Valence(str, Enum):
    POSITIVE = "positive"
    NEUTRAL = "neutral"
    NEGATIVE = "negative"


class RecordStatus(str, Enum):
    STORED = "stored"
    REMEMBERED = "remembered"
    FORGOTTEN = "forgotten"


INTEREST_LEVELS = ("low", "medium", "high")

_WHITESPACE = re.compile(r"\s+")


def normalize_value(raw: str) -> str:
    """Trim, casefold and collapse internal whitespace; reject empty results."""
    normalized = _WHITESPACE.sub(" ", raw.strip()).casefold()
    if not normalized:
        raise EmptyValueError("value is empty after normalization")
    return normalized


def require_robot(robot: str) -> str:
    if robot not in ROBOTS:
        raise UnknownRobotError(f"unknown robot {robot!r}; expected one of {ROBOTS}")
    return robot


@dataclass(frozen=True)
class PropertyKey:
    """One rememberable concept: a family plus, where the family needs it, a parameter."""

    family: PropertyFamily
    param: str | None = None

    def __post_init__(self):
        if self.family in PARAMETERIZED_FAMILIES:
            if self.param is None:
                raise InvalidObservationError(f"{self.family.value} requires a parameter")
            object.__setattr__(self, "param", normalize_value(self.param))
        elif self.param is not None:
            raise InvalidObservationError(f"{self.family.value} takes no parameter")

    @property
    def slot_id(self) -> str:
        return self.family.value if self.param is None else f"{self.family.value}.{self.param}"

    @classmethod
    def parse(cls, slot_id: str) -> "PropertyKey":
        family_token, _, param = slot_id.partition(".")
        try:
            family = PropertyFamily(family_token)
        except ValueError:
            raise InvalidObservationError(f"unknown property family {family_token!r}") from None
        return cls(family, param or None)

    def sort_key(self) -> tuple[int, str]:
        return FAMILY_ORDER.index(self.family), self.param or ""


# Retrieval probability per (family, robot). One probability per family: the
# parameter never changes the odds.
_RECALL_TABLE: dict[PropertyFamily, dict[str, float]] = {
    PropertyFamily.USERNAME: {"RoboTech": 1.0, "SunnyBot": 0.8, "MindStorm": 0.3},
    PropertyFamily.PERSONAL: {"RoboTech": 0.9, "SunnyBot": 0.4, "MindStorm": 0.4},
    PropertyFamily.TOPIC: {"RoboTech": 1.0, "SunnyBot": 1.0, "MindStorm": 0.5},
    PropertyFamily.INTEREST: {"RoboTech": 1.0, "SunnyBot": 0.9, "MindStorm": 0.4},
    PropertyFamily.FAVOURITE: {"RoboTech": 0.9, "SunnyBot": 0.6, "MindStorm": 0.2},
    PropertyFamily.SHARED_FAVOURITE: {"RoboTech": 0.9, "SunnyBot": 0.9, "MindStorm": 0.2},
    PropertyFamily.ATTIRE: {"RoboTech": 0.3, "SunnyBot": 0.7, "MindStorm": 0.1},
}

# Emotion retrieval is keyed on the valence the robot observed, not on what it
# stores: an extroverted robot perfectly retains a neutral face it mistook for
# a positive one, a neurotic robot never lets go of a negative one.
_EMOTION_TABLE: dict[str, dict[Valence, float]] = {
    "RoboTech": {Valence.POSITIVE: 0.1, Valence.NEUTRAL: 0.1, Valence.NEGATIVE: 0.1},
    "SunnyBot": {Valence.POSITIVE: 1.0, Valence.NEUTRAL: 1.0, Valence.NEGATIVE: 0.5},
    "MindStorm": {Valence.POSITIVE: 0.2, Valence.NEUTRAL: 1.0, Valence.NEGATIVE: 1.0},
}

# How each robot perceives a neutral expression at storage time.
_NEUTRAL_BIAS: dict[str, Valence] = {
    "SunnyBot": Valence.POSITIVE,
    "MindStorm": Valence.NEGATIVE,
}


def get_probability(
    robot: str, key: PropertyKey, observed_valence: Valence | None = None
) -> float:
    """Probability that `robot` later retrieves a value stored under `key`.

    For the emotion family the observed valence is required; for every other
    family supplying one is an error.
    """
    require_robot(robot)
    if key.family is PropertyFamily.EMOTION:
        if observed_valence is None:
            raise MissingValenceError("emotion probability requires the observed valence")
        return _EMOTION_TABLE[robot][Valence(observed_valence)]
    if observed_valence is not None:
        raise SpuriousValenceError(f"{key.family.value} takes no valence")
    return _RECALL_TABLE[key.family][robot]


def perceive_valence(robot: str, observed: Valence) -> Valence:
    """The valence the robot stores for an observed expression.

    Only neutral expressions are ever distorted; all other inputs pass through.
    """
    require_robot(robot)
    observed = Valence(observed)
    if observed is Valence.NEUTRAL:
        return _NEUTRAL_BIAS.get(robot, Valence.NEUTRAL)
    return observed


def classify_favourite(persona: "PersonaProfile", category: str, user_value: str) -> PropertyKey:
    """Route a favourite to sharedFavourite when the persona likes the same thing."""
    category = normalize_value(category)
    user_value = normalize_value(user_value)
    if (category, user_value) in persona.preferences:
        return PropertyKey(PropertyFamily.SHARED_FAVOURITE, category)
    return PropertyKey(PropertyFamily.FAVOURITE, category)


def validate_stored_value(key: PropertyKey, value: str) -> str:
    """Check that a stored value matches its family's shape; returns it normalized."""
    value = normalize_value(value)
    if key.family is PropertyFamily.INTEREST and value not in INTEREST_LEVELS:
        raise InvalidObservationError(
            f"interest level must be one of {INTEREST_LEVELS}, got {value!r}"
        )
    if key.family is PropertyFamily.EMOTION and value not in Valence._value2member_map_:
        raise InvalidObservationError(f"emotion value must be a valence, got {value!r}")
    return value


@dataclass(frozen=True)
class MemoryRecord:
    """One stored fact plus its retrieval odds and current recall status."""

    key: PropertyKey
    value: str
    probability: float
    status: RecordStatus
    observed_valence: Valence | None
    session_observed: int

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise InvalidObservationError(f"probability {self.probability} outside [0, 1]")
        is_emotion = self.key.family is PropertyFamily.EMOTION
        if is_emotion and self.observed_valence is None:
            raise InvalidObservationError("emotion records carry the observed valence")
        if not is_emotion and self.observed_valence is not None:
            raise InvalidObservationError("only emotion records carry an observed valence")
        if self.session_observed < 1:
            raise InvalidObservationError("session_observed must be a positive integer")


@dataclass
class UserModel:
    """Everything one robot knows about one user, keyed by property."""

    user_id: str
    robot: str
    records: dict[PropertyKey, MemoryRecord] = field(default_factory=dict)
    schema_version: int = 1

    def copy(self) -> "UserModel":
        return UserModel(self.user_id, self.robot, dict(self.records), self.schema_version)

    def sorted_records(self) -> list[MemoryRecord]:
        return [self.records[key] for key in sorted(self.records, key=PropertyKey.sort_key)]
