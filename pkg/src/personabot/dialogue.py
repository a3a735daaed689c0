"""Persona-styled slot-filling conversations driven by recall outcomes.

A session is a fixed plan of dialogue acts. Some acts await a user reply
(questions), the rest are said in passing. A first session walks the full
information-collection script; later sessions open by recalling the stored
model and plan their acts from what survived: greet by name or apologize and
re-ask, mention remembered facts, recommend films from remembered
favourites, and revisit a persona-dependent subset of what was forgotten.

Everything is deterministic: given the same store contents, config and user
input, a session replays byte-for-byte.
"""

from __future__ import annotations

import uuid
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    EmptyValueError,
    InvalidObservationError,
    SessionClosedError,
    UnknownRobotError,
)
from .kb import KnowledgeBase, load_kb, recommend
from .memory import (
    ROBOTS,
    PropertyFamily,
    PropertyKey,
    UserModel,
    Valence,
    normalize_value,
    validate_stored_value,
)
from .personas import PersonaProfile, StyleParams, builtin_personas, style_params
from .recall import (
    Observation,
    ObservationChannel,
    RecallConfig,
    RecallOutcome,
    populate,
    reacquire,
    recall,
)
from .store import ModelStore
from .templates import TemplatePack, load_templates, render


class ActKind(str, Enum):
    GREET_WITH_NAME = "GreetWithName"
    GREET_ANONYMOUS = "GreetAnonymous"
    RE_ASK = "ReAsk"
    ASK_SLOT = "AskSlot"
    ASK_MOTIVATION = "AskMotivation"
    ASK_DETAIL = "AskDetail"
    SELF_DISCLOSE = "SelfDisclose"
    COMMENT_ATTIRE = "CommentAttire"
    REFERENCE_EMOTION = "ReferenceEmotion"
    RECOMMEND = "Recommend"
    SHARED_FAVOURITE_CALLOUT = "SharedFavouriteCallout"
    RECALL_PERSONAL = "RecallPersonal"
    FAREWELL = "Farewell"


# Acts that pause the plan until the user replies.
AWAITING_KINDS = frozenset(
    {ActKind.ASK_SLOT, ActKind.RE_ASK, ActKind.ASK_MOTIVATION, ActKind.ASK_DETAIL, ActKind.RECOMMEND}
)

# Prompts whose replies are conversation color: logged, never stored.
COLOR_KINDS = frozenset({ActKind.ASK_MOTIVATION, ActKind.ASK_DETAIL, ActKind.RECOMMEND})


@dataclass(frozen=True)
class DialogueAct:
    kind: ActKind
    slots: dict[str, str] = field(default_factory=dict)

    @property
    def slot_key(self) -> PropertyKey | None:
        slot_id = self.slots.get("slot")
        return PropertyKey.parse(slot_id) if slot_id else None


class Phase(str, Enum):
    GREETING = "greeting"
    SLOT_FILLING = "slot_filling"
    RECALL_TALK = "recall_talk"
    FAREWELL = "farewell"
    CLOSED = "closed"


@dataclass(frozen=True)
class SideChannel:
    """Explicit stand-in for the perception the robot would otherwise need."""

    emotion_valence: Valence | None = None
    attire: dict[str, str] | None = None


@dataclass
class DialogueState:
    session_id: str
    user_id: str
    robot: str
    session_index: int
    phase: Phase
    plan: list[DialogueAct]
    cursor: int = 0
    awaiting: DialogueAct | None = None
    collected: list[Observation] = field(default_factory=list)
    emotion_sightings: list[Valence] = field(default_factory=list)
    attire_seen: dict[str, str] = field(default_factory=dict)
    model: UserModel | None = None
    recall_outcome: RecallOutcome | None = None
    turn_count: int = 0

    @property
    def pending_slots(self) -> list[PropertyKey]:
        keys = []
        if self.awaiting is not None and self.awaiting.slot_key is not None:
            keys.append(self.awaiting.slot_key)
        keys.extend(
            act.slot_key
            for act in self.plan[self.cursor :]
            if act.slot_key is not None and act.kind in (ActKind.ASK_SLOT, ActKind.RE_ASK)
        )
        return keys


# The information-collection script every persona runs on first contact.
FIRST_SESSION_SLOTS = (
    PropertyKey(PropertyFamily.USERNAME),
    PropertyKey(PropertyFamily.PERSONAL, "profession"),
    PropertyKey(PropertyFamily.TOPIC),
    PropertyKey(PropertyFamily.INTEREST, "cinema"),
    PropertyKey(PropertyFamily.FAVOURITE, "film"),
    PropertyKey(PropertyFamily.FAVOURITE, "actor"),
    PropertyKey(PropertyFamily.FAVOURITE, "director"),
)

# Slots whose answers a detail-oriented persona probes further.
_DETAIL_FOLLOWUP_SLOTS = frozenset({"personal.profession", "favourite.film"})

# Favourite categories that map onto knowledge-base entity types.
_KB_CATEGORIES = frozenset({"film", "actor", "director", "genre"})


def first_session_plan(style: StyleParams) -> list[DialogueAct]:
    plan: list[DialogueAct] = [DialogueAct(ActKind.GREET_ANONYMOUS)]
    if style.self_disclosure:
        plan.append(DialogueAct(ActKind.SELF_DISCLOSE, {"subject": "greeting"}))
    for key in FIRST_SESSION_SLOTS:
        if style.self_disclosure and key.slot_id == "topic":
            plan.append(DialogueAct(ActKind.SELF_DISCLOSE, {"subject": "topic"}))
        if style.self_disclosure and key.slot_id == "favourite.film":
            plan.append(DialogueAct(ActKind.SELF_DISCLOSE, {"subject": "films"}))
        plan.append(DialogueAct(ActKind.ASK_SLOT, {"slot": key.slot_id}))
    return plan


def plan_recall_acts(
    outcome: RecallOutcome,
    model: UserModel,
    style: StyleParams,
    kb: KnowledgeBase,
) -> list[DialogueAct]:
    """Deterministic act selection from what this session remembered and forgot."""
    acts: list[DialogueAct] = []
    remembered = sorted(outcome.remembered, key=PropertyKey.sort_key)
    username_key = PropertyKey(PropertyFamily.USERNAME)
    if username_key in outcome.remembered:
        acts.append(
            DialogueAct(ActKind.GREET_WITH_NAME, {"name": model.records[username_key].value})
        )
    else:
        acts.append(DialogueAct(ActKind.RE_ASK, {"slot": "username"}))
    for key in remembered:
        if key.family is PropertyFamily.PERSONAL:
            acts.append(
                DialogueAct(
                    ActKind.RECALL_PERSONAL,
                    {"param": key.param, "value": model.records[key].value},
                )
            )
    for key in remembered:
        if key.family is PropertyFamily.ATTIRE:
            acts.append(
                DialogueAct(
                    ActKind.COMMENT_ATTIRE,
                    {"aspect": key.param, "value": model.records[key].value},
                )
            )
    emotion_key = PropertyKey(PropertyFamily.EMOTION)
    if emotion_key in outcome.remembered:
        acts.append(
            DialogueAct(
                ActKind.REFERENCE_EMOTION, {"valence": model.records[emotion_key].value}
            )
        )
    if style.preference_mirroring:
        for key in remembered:
            if key.family is PropertyFamily.SHARED_FAVOURITE:
                acts.append(
                    DialogueAct(
                        ActKind.SHARED_FAVOURITE_CALLOUT,
                        {"category": key.param, "value": model.records[key].value},
                    )
                )
    favourites = {
        (key.param, model.records[key].value)
        for key in outcome.remembered
        if key.family in (PropertyFamily.FAVOURITE, PropertyFamily.SHARED_FAVOURITE)
    }
    suggestion = recommend(kb, favourites)
    if suggestion is not None:
        slots = {"film": suggestion.film, "reason": suggestion.reason, **suggestion.detail}
        acts.append(DialogueAct(ActKind.RECOMMEND, slots))
    # Revisit policy: a forgotten topic and favourite film are always worth
    # re-asking; forgotten personal details only interest detail probers.
    forgotten = sorted(outcome.forgotten, key=PropertyKey.sort_key)
    if PropertyKey(PropertyFamily.TOPIC) in outcome.forgotten:
        acts.append(DialogueAct(ActKind.RE_ASK, {"slot": "topic"}))
    film_keys = (
        PropertyKey(PropertyFamily.FAVOURITE, "film"),
        PropertyKey(PropertyFamily.SHARED_FAVOURITE, "film"),
    )
    if any(key in outcome.forgotten for key in film_keys):
        acts.append(DialogueAct(ActKind.RE_ASK, {"slot": "favourite.film"}))
    if style.detail_probing:
        for key in forgotten:
            if key.family is PropertyFamily.PERSONAL:
                acts.append(DialogueAct(ActKind.RE_ASK, {"slot": key.slot_id}))
    return acts


def _prevalent_valence(sightings: list[Valence]) -> Valence:
    counts = Counter(sightings)
    best = max(counts.values())
    for valence in reversed(sightings):
        if counts[valence] == best:
            return valence
    raise AssertionError("unreachable: sightings is non-empty")


class DialogueEngine:
    """Runs sessions against a store; one engine serves any number of users."""

    def __init__(
        self,
        store: ModelStore,
        personas: dict[str, PersonaProfile] | None = None,
        templates: TemplatePack | None = None,
        kb: KnowledgeBase | None = None,
    ):
        self.store = store
        self.personas = personas or builtin_personas()
        self.templates = templates or load_templates()
        self.kb = kb or load_kb()

    def _persona(self, robot: str) -> PersonaProfile:
        try:
            return self.personas[robot]
        except KeyError:
            raise UnknownRobotError(
                f"unknown robot {robot!r}; expected one of {ROBOTS}"
            ) from None

    def start_session(
        self,
        user_id: str,
        robot: str,
        config: RecallConfig | None = None,
        session_id: str | None = None,
    ) -> tuple[DialogueState, list[DialogueAct], str]:
        """Open a session: recall (from the second session on) and plan the opening."""
        config = config or RecallConfig()
        persona = self._persona(robot)
        style = style_params(persona)
        model = self.store.load(user_id, robot)
        session_index = 1 + self.store.completed_sessions(user_id, robot)
        session_id = session_id or uuid.uuid4().hex
        outcome = None
        if session_index >= 2:
            model, outcome = recall(model, config, session_index)
            self.store.save(model)  # recall outcomes persist even if the session is abandoned
            plan = plan_recall_acts(outcome, model, style, self.kb)
            phase = Phase.RECALL_TALK
        else:
            plan = first_session_plan(style)
            phase = Phase.SLOT_FILLING
        state = DialogueState(
            session_id=session_id,
            user_id=user_id,
            robot=robot,
            session_index=session_index,
            phase=phase,
            plan=plan,
            model=model,
            recall_outcome=outcome,
        )
        self.store.append_log(
            user_id,
            robot,
            {
                "session_id": session_id,
                "meta": {
                    "robot": robot,
                    "user_id": user_id,
                    "session_index": session_index,
                    "mode": config.mode.value,
                    "threshold": config.threshold,
                    "seed": config.seed,
                },
            },
        )
        acts = self._advance(state)
        text = render(acts, persona, self.templates)
        self._log_robot_turn(state, acts, text)
        return state, acts, text

    def step(
        self,
        state: DialogueState,
        user_text: str,
        side: SideChannel | None = None,
    ) -> tuple[DialogueState, list[DialogueAct], str]:
        """Consume one user turn: fill the pending slot, then advance the plan."""
        if state.phase is Phase.CLOSED:
            raise SessionClosedError(f"session {state.session_id} is closed")
        persona = self._persona(state.robot)
        self._record_side(state, side)
        self._log_user_turn(state, user_text, side)
        prompt = state.awaiting
        acts: list[DialogueAct] = []
        if prompt is not None and not self._accept_reply(state, prompt, user_text):
            # Unusable answer: repeat the question, consume nothing else.
            acts = [prompt]
        else:
            state.awaiting = None
            acts = self._advance(state)
        text = render(acts, persona, self.templates)
        self._log_robot_turn(state, acts, text)
        return state, acts, text

    def _accept_reply(self, state: DialogueState, prompt: DialogueAct, user_text: str) -> bool:
        if prompt.kind in COLOR_KINDS:
            return bool(user_text.strip())
        key = prompt.slot_key
        assert key is not None, "slot prompts always carry their key"
        try:
            value = normalize_value(user_text)
            if key.family in (PropertyFamily.FAVOURITE, PropertyFamily.SHARED_FAVOURITE):
                value = self._canonical_favourite(key.param, value)
            value = validate_stored_value(key, value)
            observation = Observation(key, value, ObservationChannel.EXPLICIT_ANSWER)
        except (EmptyValueError, InvalidObservationError):
            return False
        state.collected.append(observation)
        self._insert_followups(state, key)
        return True

    def _canonical_favourite(self, category: str, value: str) -> str:
        if category in _KB_CATEGORIES:
            entry = self.kb.lookup(category, value)
            if entry is not None:
                return entry.name
        return value

    def _insert_followups(self, state: DialogueState, key: PropertyKey) -> None:
        style = style_params(self._persona(state.robot))
        followups = []
        if style.detail_probing and key.slot_id in _DETAIL_FOLLOWUP_SLOTS:
            followups.append(DialogueAct(ActKind.ASK_DETAIL, {"about": key.slot_id}))
        if style.motivation_probing and key.family in (
            PropertyFamily.FAVOURITE,
            PropertyFamily.SHARED_FAVOURITE,
        ):
            followups.append(DialogueAct(ActKind.ASK_MOTIVATION, {"about": key.slot_id}))
        state.plan[state.cursor : state.cursor] = followups

    def _record_side(self, state: DialogueState, side: SideChannel | None) -> None:
        if side is None:
            return
        if side.emotion_valence is not None:
            state.emotion_sightings.append(Valence(side.emotion_valence))
        for aspect, value in (side.attire or {}).items():
            state.attire_seen[normalize_value(aspect)] = normalize_value(value)

    def _advance(self, state: DialogueState) -> list[DialogueAct]:
        """Emit plan acts up to the next question; close the session when none remain."""
        acts: list[DialogueAct] = []
        while state.cursor < len(state.plan):
            act = state.plan[state.cursor]
            state.cursor += 1
            acts.append(act)
            if act.kind in AWAITING_KINDS:
                state.awaiting = act
                return acts
        state.awaiting = None
        acts.append(DialogueAct(ActKind.FAREWELL))
        state.phase = Phase.FAREWELL
        self._commit(state)
        state.phase = Phase.CLOSED
        return acts

    def _commit(self, state: DialogueState) -> None:
        """Persist everything this session observed."""
        persona = self._persona(state.robot)
        observations = list(state.collected)
        for aspect in sorted(state.attire_seen):
            observations.append(
                Observation(
                    PropertyKey(PropertyFamily.ATTIRE, aspect),
                    state.attire_seen[aspect],
                    ObservationChannel.SIDE_CHANNEL,
                )
            )
        if state.emotion_sightings:
            observations.append(
                Observation(
                    PropertyKey(PropertyFamily.EMOTION),
                    _prevalent_valence(state.emotion_sightings),
                    ObservationChannel.SIDE_CHANNEL,
                )
            )
        model = state.model
        if state.session_index == 1:
            model = populate(model, persona, observations, state.session_index)
        else:
            for observation in observations:
                model = reacquire(model, observation, state.session_index)
        self.store.save(model)
        state.model = model

    def _log_user_turn(self, state: DialogueState, text: str, side: SideChannel | None) -> None:
        side_obj = None
        if side is not None and (side.emotion_valence is not None or side.attire):
            side_obj = {
                "emotion_valence": side.emotion_valence.value if side.emotion_valence else None,
                "attire": dict(side.attire) if side.attire else None,
            }
        state.turn_count += 1
        self.store.append_log(
            state.user_id,
            state.robot,
            {
                "session_id": state.session_id,
                "turn": state.turn_count,
                "speaker": "user",
                "text": text,
                "acts": [],
                "side_channel": side_obj,
            },
        )

    def _log_robot_turn(self, state: DialogueState, acts: list[DialogueAct], text: str) -> None:
        state.turn_count += 1
        self.store.append_log(
            state.user_id,
            state.robot,
            {
                "session_id": state.session_id,
                "turn": state.turn_count,
                "speaker": "robot",
                "text": text,
                "acts": [{"kind": act.kind.value, "slots": dict(act.slots)} for act in acts],
                "side_channel": None,
            },
        )
