"""Robot personas whose Big Five traits decide what they remember about each user."""

from .kb import KnowledgeBase, Recommendation, load_kb, recommend
from .memory import (
    ROBOTS,
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
)
from .personas import PersonaProfile, StyleParams, get_persona, load_personas, style_params
from .recall import (
    Observation,
    ObservationChannel,
    RecallConfig,
    RecallMode,
    RecallOutcome,
    populate,
    reacquire,
    recall,
)
from .store import ModelStore

__version__ = "0.1.0"

__all__ = [
    "ROBOTS",
    "KnowledgeBase",
    "MemoryRecord",
    "ModelStore",
    "Observation",
    "ObservationChannel",
    "PersonaProfile",
    "PropertyFamily",
    "PropertyKey",
    "RecallConfig",
    "RecallMode",
    "RecallOutcome",
    "Recommendation",
    "RecordStatus",
    "StyleParams",
    "UserModel",
    "Valence",
    "classify_favourite",
    "get_persona",
    "get_probability",
    "load_kb",
    "load_personas",
    "normalize_value",
    "perceive_valence",
    "populate",
    "reacquire",
    "recall",
    "recommend",
    "style_params",
]
