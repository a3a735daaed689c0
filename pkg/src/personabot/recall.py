"""Memory lifecycle: store every observation, then decide per session what survives.

During a first session the robot saves everything it was told or noticed.
From the second session on, each stored record is either remembered or
forgotten, in one of two modes:

* threshold: remembered iff probability >= threshold (default 0.7); purely
  deterministic and recomputed on every recall.
* stochastic: each freshly stored record gets exactly one Bernoulli draw at
  its probability; the outcome then sticks until the record is re-acquired.

Stochastic draws are hash-derived from (seed, user_id, robot, key, stream
position) so that outcomes never depend on iteration order, are reproducible
across processes, and differ between users even under the same seed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Union

from .errors import InvalidObservationError
from .memory import (
    MemoryRecord,
    PropertyFamily,
    PropertyKey,
    RecordStatus,
    UserModel,
    Valence,
    classify_favourite,
    get_probability,
    normalize_value,
    perceive_valence,
    validate_stored_value,
)
from .personas import PersonaProfile, get_persona

DEFAULT_THRESHOLD = 0.7
_SEED_LIMIT = 2**64

# Families the user never states out loud; they come from the perception
# stand-in instead.
SIDE_CHANNEL_FAMILIES = frozenset({PropertyFamily.EMOTION, PropertyFamily.ATTIRE})


class RecallMode(str, Enum):
    THRESHOLD = "threshold"
    STOCHASTIC = "stochastic"


class ObservationChannel(str, Enum):
    EXPLICIT_ANSWER = "explicit_answer"
    SIDE_CHANNEL = "side_channel"


@dataclass(frozen=True)
class RecallConfig:
    mode: RecallMode = RecallMode.THRESHOLD
    threshold: float = DEFAULT_THRESHOLD
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", RecallMode(self.mode))
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")
        if not 0 <= self.seed < _SEED_LIMIT:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class Observation:
    """One piece of user information as it arrived, before storage."""

    key: PropertyKey
    raw_value: Union[str, Valence]
    channel: ObservationChannel

    def __post_init__(self):
        expected = (
            ObservationChannel.SIDE_CHANNEL
            if self.key.family in SIDE_CHANNEL_FAMILIES
            else ObservationChannel.EXPLICIT_ANSWER
        )
        if ObservationChannel(self.channel) is not expected:
            raise InvalidObservationError(
                f"{self.key.slot_id} must arrive via {expected.value}"
            )


@dataclass(frozen=True)
class RecallOutcome:
    remembered: frozenset[PropertyKey]
    forgotten: frozenset[PropertyKey]
    session_index: int


def recall_draw(seed: int, user_id: str, robot: str, key: PropertyKey, position: int) -> float:
    """Uniform draw in [0, 1), fully determined by its arguments."""
    payload = json.dumps(
        [seed, user_id, robot, key.family.value, key.param, position],
        separators=(",", ":"),
    )
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / _SEED_LIMIT


def _build_record(
    persona: PersonaProfile, observation: Observation, session_index: int
) -> MemoryRecord:
    key = observation.key
    observed_valence = None
    if key.family is PropertyFamily.EMOTION:
        try:
            observed_valence = Valence(observation.raw_value)
        except ValueError:
            raise InvalidObservationError(
                f"emotion observation must be a valence, got {observation.raw_value!r}"
            ) from None
        probability = get_probability(persona.robot_id, key, observed_valence)
        value = perceive_valence(persona.robot_id, observed_valence).value
    else:
        value = validate_stored_value(key, str(observation.raw_value))
        if key.family in (PropertyFamily.FAVOURITE, PropertyFamily.SHARED_FAVOURITE):
            key = classify_favourite(persona, key.param, value)
        probability = get_probability(persona.robot_id, key)
    return MemoryRecord(
        key=key,
        value=value,
        probability=probability,
        status=RecordStatus.STORED,
        observed_valence=observed_valence,
        session_observed=session_index,
    )


def populate(
    model: UserModel,
    persona: PersonaProfile,
    observations: Iterable[Observation],
    session_index: int,
) -> UserModel:
    """Store every observation; none may be dropped, so validation is all-or-nothing."""
    if persona.robot_id != model.robot:
        raise InvalidObservationError(
            f"persona {persona.robot_id} does not own model for {model.robot}"
        )
    fresh = [_build_record(persona, obs, session_index) for obs in observations]
    updated = model.copy()
    for record in fresh:
        updated.records[record.key] = record
    return updated


def reacquire(model: UserModel, observation: Observation, session_index: int) -> UserModel:
    """Overwrite one key with a freshly stored record, making it recallable again."""
    persona = get_persona(model.robot)
    return populate(model, persona, [observation], session_index)


def recall(
    model: UserModel, config: RecallConfig, session_index: int
) -> tuple[UserModel, RecallOutcome]:
    """Split the model's records into remembered and forgotten for this session."""
    if session_index < 2:
        raise ValueError("recall runs from the second session on")
    remembered: set[PropertyKey] = set()
    forgotten: set[PropertyKey] = set()
    records: dict[PropertyKey, MemoryRecord] = {}
    for key, record in model.records.items():
        if config.mode is RecallMode.THRESHOLD:
            kept = record.probability >= config.threshold
        elif record.status is RecordStatus.STORED:
            draw = recall_draw(config.seed, model.user_id, model.robot, key, record.session_observed)
            kept = draw < record.probability
        else:
            # A draw happens once; afterwards the status itself is the answer.
            kept = record.status is RecordStatus.REMEMBERED
        records[key] = replace(
            record, status=RecordStatus.REMEMBERED if kept else RecordStatus.FORGOTTEN
        )
        (remembered if kept else forgotten).add(key)
    updated = UserModel(model.user_id, model.robot, records, model.schema_version)
    outcome = RecallOutcome(frozenset(remembered), frozenset(forgotten), session_index)
    return updated, outcome


def observation_from_text(key: PropertyKey, text: str) -> Observation:
    """Build an explicit-answer observation from a raw user reply."""
    return Observation(key, normalize_value(text), ObservationChannel.EXPLICIT_ANSWER)
