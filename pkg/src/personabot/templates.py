"""Per-persona text rendering for dialogue acts.

A template pack maps every act kind to either one template string or, for
kinds whose wording depends on a slot (which question, which reason, ...),
a map from that slot's value to a template plus a "_default" fallback.
Packs are validated on load so a missing template is a startup failure,
never a mid-conversation one.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import MissingTemplateError
from .memory import ROBOTS
from .personas import PersonaProfile

# Act kinds a pack must cover (mirrors dialogue.ActKind; kept as strings so
# the data file stays the single wording authority).
ACT_KINDS = (
    "GreetWithName",
    "GreetAnonymous",
    "ReAsk",
    "AskSlot",
    "AskMotivation",
    "AskDetail",
    "SelfDisclose",
    "CommentAttire",
    "ReferenceEmotion",
    "Recommend",
    "SharedFavouriteCallout",
    "RecallPersonal",
    "Farewell",
)

# For dict-valued kinds: which slot selects the wording variant.
_VARIANT_SLOT = {
    "AskSlot": "slot",
    "ReAsk": "slot",
    "SelfDisclose": "subject",
    "Recommend": "reason",
    "RecallPersonal": "param",
    "CommentAttire": "aspect",
    "SharedFavouriteCallout": "category",
    "ReferenceEmotion": "valence",
}

# Slot roles rendered with display capitalization (proper names and titles).
_TITLE_ROLES = frozenset({"name", "film", "actor", "director"})

_MOOD_PHRASES = {
    "positive": "you seemed really happy",
    "neutral": "you seemed quite calm",
    "negative": "you seemed rather unhappy",
}

TemplatePack = dict[str, dict[str, object]]


def load_templates(path: Path | None = None) -> TemplatePack:
    if path is None:
        text = resources.files("personabot.data").joinpath("templates.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        pack = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MissingTemplateError(f"template pack is not valid JSON: {exc}") from exc
    validate_pack(pack)
    return pack


def validate_pack(pack: TemplatePack) -> None:
    """Fail fast when any persona misses an act kind or a variant fallback."""
    for robot in ROBOTS:
        persona_pack = pack.get(robot)
        if persona_pack is None:
            raise MissingTemplateError(f"no template pack for {robot}")
        for kind in ACT_KINDS:
            template = persona_pack.get(kind)
            if template is None:
                raise MissingTemplateError(f"{robot} has no template for {kind}")
            if isinstance(template, dict) and "_default" not in template:
                raise MissingTemplateError(f"{robot}.{kind} variants need a _default")


def _display(role: str, value: str, slots: dict[str, str]) -> str:
    if role in _TITLE_ROLES:
        return value.title()
    if role == "value" and slots.get("category") in ("actor", "director"):
        return value.title()
    if role == "slot":
        return value.replace(".", " ")
    return value


def render_act(act, persona: PersonaProfile, pack: TemplatePack) -> str:
    kind = act.kind.value if hasattr(act.kind, "value") else str(act.kind)
    template = pack[persona.robot_id][kind]
    if isinstance(template, dict):
        variant = act.slots.get(_VARIANT_SLOT.get(kind, ""), "")
        template = template.get(variant, template["_default"])
    fields = {role: _display(role, value, act.slots) for role, value in act.slots.items()}
    if kind == "ReferenceEmotion":
        fields["mood"] = _MOOD_PHRASES[act.slots["valence"]]
    try:
        return template.format(**fields)
    except (KeyError, IndexError) as exc:
        raise MissingTemplateError(
            f"{persona.robot_id}.{kind} references missing placeholder {exc}"
        ) from exc


def render(acts: Iterable, persona: PersonaProfile, pack: TemplatePack) -> str:
    """Deterministic text for a robot turn: each act rendered, joined by spaces."""
    return " ".join(render_act(act, persona, pack) for act in acts)
