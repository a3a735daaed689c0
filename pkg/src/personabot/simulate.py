"""Batch drivers: scripted multi-session runs, recall statistics, transcript replay.

These run the dialogue engine in-process, with no service involved, so the
whole behaviour of the system can be exercised and verified from a shell.
"""

from __future__ import annotations

import csv
import json
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .dialogue import ActKind, DialogueAct, DialogueEngine, Phase, SideChannel
from .errors import DataFileError
from .memory import ROBOTS, PropertyFamily, PropertyKey, Valence, get_probability
from .recall import RecallConfig, recall_draw
from .store import ModelStore, model_to_dict

# Answer keys for prompts that are not slot questions.
_COLOR_ANSWER_KEYS = {
    ActKind.ASK_MOTIVATION: "motivation",
    ActKind.ASK_DETAIL: "detail",
    ActKind.RECOMMEND: "recommend",
}


@dataclass(frozen=True)
class ScriptSession:
    answers: dict[str, str]
    attire: dict[str, str] = field(default_factory=dict)
    emotion: dict[str, str] = field(default_factory=dict)

    def valence_for(self, robot: str) -> Valence | None:
        raw = self.emotion.get(robot, self.emotion.get("default"))
        return Valence(raw) if raw else None


@dataclass(frozen=True)
class UserScript:
    user_id: str
    display_name: str
    sessions: tuple[ScriptSession, ...]


def load_script(path: Path | str) -> UserScript:
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFileError(f"script {path} is not valid JSON: {exc}") from exc
    try:
        sessions = []
        for raw in data["sessions"]:
            emotion = raw.get("emotion_valence", {})
            if isinstance(emotion, str):
                emotion = {"default": emotion}
            sessions.append(
                ScriptSession(
                    answers=dict(raw["answers"]),
                    attire=dict(raw.get("attire", {})),
                    emotion=dict(emotion),
                )
            )
        return UserScript(
            user_id=data["user_id"],
            display_name=data.get("display_name", data["user_id"]),
            sessions=tuple(sessions),
        )
    except (KeyError, TypeError) as exc:
        raise DataFileError(f"script {path} is malformed: {exc}") from exc


def _answer_key(prompt: DialogueAct) -> str:
    if prompt.kind in _COLOR_ANSWER_KEYS:
        return _COLOR_ANSWER_KEYS[prompt.kind]
    return prompt.slots["slot"]


@dataclass
class SessionRun:
    session_id: str
    session_index: int
    acts: list[DialogueAct]
    robot_turns: list[str]


@dataclass
class SimulationResult:
    robot: str
    user_id: str
    sessions: list[SessionRun]
    model: dict
    log_path: Path


def run_script(
    robot: str,
    script: UserScript,
    sessions: int,
    config: RecallConfig,
    store: ModelStore,
) -> SimulationResult:
    """Run the scripted user through `sessions` conversations and dump the model."""
    if sessions < 1:
        raise DataFileError("sessions must be at least 1")
    if sessions > len(script.sessions):
        raise DataFileError(
            f"script provides {len(script.sessions)} sessions, {sessions} requested"
        )
    engine = DialogueEngine(store)
    runs: list[SessionRun] = []
    for index in range(1, sessions + 1):
        scripted = script.sessions[index - 1]
        session_id = f"{script.user_id}-{robot}-s{index}"
        state, acts, text = engine.start_session(
            script.user_id, robot, config, session_id=session_id
        )
        if state.session_index != index:
            raise DataFileError(
                f"store already holds {state.session_index - 1} completed sessions; "
                "use a fresh --store for a scripted run"
            )
        run = SessionRun(session_id, state.session_index, list(acts), [text])
        first_step = True
        while state.phase is not Phase.CLOSED:
            if state.awaiting is None:
                raise AssertionError("open session without a pending prompt")
            key = _answer_key(state.awaiting)
            try:
                answer = scripted.answers[key]
            except KeyError:
                raise DataFileError(
                    f"script has no answer for {key!r} (session {index}, robot {robot})"
                ) from None
            side = None
            if first_step:
                side = SideChannel(
                    emotion_valence=scripted.valence_for(robot),
                    attire=dict(scripted.attire) or None,
                )
                first_step = False
            state, acts, text = engine.step(state, answer, side)
            run.acts.extend(acts)
            run.robot_turns.append(text)
        runs.append(run)
    model = store.load(script.user_id, robot)
    return SimulationResult(
        robot=robot,
        user_id=script.user_id,
        sessions=runs,
        model=model_to_dict(model),
        log_path=store.log_path(script.user_id, robot),
    )


# One representative parameter per parameterized family; the probability is
# family-wide, so any parameter samples the same cell.
_STAT_PARAMS = {
    PropertyFamily.PERSONAL: "profession",
    PropertyFamily.INTEREST: "cinema",
    PropertyFamily.FAVOURITE: "film",
    PropertyFamily.SHARED_FAVOURITE: "actor",
    PropertyFamily.ATTIRE: "color",
}


@dataclass(frozen=True)
class StatRow:
    robot: str
    family: str
    valence: str
    expected: float
    observed: float
    trials: int


def stats(trials: int, seed: int) -> list[StatRow]:
    """Empirical remembered frequency per table cell over fresh simulated users."""
    if trials < 1:
        raise DataFileError("trials must be at least 1")
    rows: list[StatRow] = []
    for robot in ROBOTS:
        for family in PropertyFamily:
            key = PropertyKey(family, _STAT_PARAMS.get(family))
            valences = list(Valence) if family is PropertyFamily.EMOTION else [None]
            for valence in valences:
                expected = get_probability(robot, key, valence)
                kept = 0
                for trial in range(trials):
                    draw = recall_draw(seed, f"trial-{trial}", robot, key, 1)
                    if draw < expected:
                        kept += 1
                rows.append(
                    StatRow(
                        robot=robot,
                        family=family.value,
                        valence=valence.value if valence else "",
                        expected=expected,
                        observed=kept / trials,
                        trials=trials,
                    )
                )
    return rows


def write_stats_csv(rows: list[StatRow], path: Path | str) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["robot", "family", "valence", "expected", "observed", "trials"])
        for row in rows:
            writer.writerow(
                [row.robot, row.family, row.valence, row.expected, f"{row.observed:.4f}", row.trials]
            )


@dataclass
class ReplayReport:
    identical: bool
    sessions: int
    robot_turns: int
    divergence: dict | None = None

    def summary(self) -> str:
        if self.identical:
            return (
                f"identical: {self.robot_turns} robot turns across "
                f"{self.sessions} sessions reproduced byte-for-byte"
            )
        where = self.divergence
        return (
            f"divergence at session {where['session_id']} turn {where['turn']}:\n"
            f"  recorded: {where['recorded']}\n"
            f"  replayed: {where['replayed']}"
        )


def _parse_transcript(path: Path | str) -> list[dict]:
    """Split a log file into sessions: {meta, turns} in recorded order."""
    try:
        lines = Path(path).read_text("utf-8").splitlines()
    except OSError as exc:
        raise DataFileError(f"cannot read transcript {path}: {exc}") from exc
    sessions: list[dict] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataFileError(f"{path}:{number} is not valid JSON: {exc}") from exc
        if "meta" in entry:
            meta = entry["meta"]
            for field_name in ("robot", "user_id", "session_index", "mode", "threshold", "seed"):
                if field_name not in meta:
                    raise DataFileError(
                        f"{path}:{number} meta line is missing the {field_name!r} field"
                    )
            sessions.append({"session_id": entry.get("session_id"), "meta": meta, "turns": []})
        elif "turn" in entry:
            if not sessions:
                raise DataFileError(f"{path}:{number} turn appears before any session meta line")
            sessions[-1]["turns"].append(entry)
        else:
            raise DataFileError(f"{path}:{number} is neither a turn nor a meta line")
    if not sessions:
        raise DataFileError(f"{path} holds no sessions")
    expected_indices = list(range(1, len(sessions) + 1))
    actual_indices = [s["meta"]["session_index"] for s in sessions]
    if actual_indices != expected_indices:
        raise DataFileError(
            f"transcript sessions must run {expected_indices}, found {actual_indices}"
        )
    return sessions


def replay(transcript: Path | str) -> ReplayReport:
    """Re-drive every session against a fresh store and compare robot turns."""
    sessions = _parse_transcript(transcript)
    robot_turns = 0
    with tempfile.TemporaryDirectory(prefix="personabot-replay-") as tmp:
        engine = DialogueEngine(ModelStore(tmp))
        for session in sessions:
            meta = session["meta"]
            config = RecallConfig(
                mode=meta["mode"], threshold=meta["threshold"], seed=meta["seed"]
            )
            recorded = list(session["turns"])
            position = 0

            def mismatch(turn_number: int, recorded_text: str | None, replayed: str | None):
                return ReplayReport(
                    identical=False,
                    sessions=len(sessions),
                    robot_turns=robot_turns,
                    divergence={
                        "session_id": session["session_id"],
                        "turn": turn_number,
                        "recorded": recorded_text,
                        "replayed": replayed,
                    },
                )

            state, _, text = engine.start_session(
                meta["user_id"], meta["robot"], config, session_id=session["session_id"]
            )
            while True:
                if position >= len(recorded) or recorded[position]["speaker"] != "robot":
                    return mismatch(position + 1, None, text)
                if recorded[position]["text"] != text:
                    return mismatch(
                        recorded[position]["turn"], recorded[position]["text"], text
                    )
                robot_turns += 1
                position += 1
                if state.phase is Phase.CLOSED:
                    break
                if position >= len(recorded) or recorded[position]["speaker"] != "user":
                    return mismatch(position + 1, None, "<awaiting recorded user turn>")
                user_turn = recorded[position]
                position += 1
                side_obj = user_turn.get("side_channel")
                side = None
                if side_obj:
                    valence = side_obj.get("emotion_valence")
                    side = SideChannel(
                        emotion_valence=Valence(valence) if valence else None,
                        attire=side_obj.get("attire"),
                    )
                state, _, text = engine.step(state, user_turn["text"], side)
            if position != len(recorded):
                extra = recorded[position]
                return mismatch(extra["turn"], extra["text"], None)
    return ReplayReport(identical=True, sessions=len(sessions), robot_turns=robot_turns)
