"""On-disk persistence: one JSON model document and one jsonl log per (user, robot).

Layout under a store root:

    <root>/<user_id>/<robot>.json       the user model document
    <root>/<user_id>/<robot>.log.jsonl  append-only conversation log

The log holds one JSON object per line: either a turn
({session_id, turn, speaker, text, acts, side_channel}) or a session-start
meta line ({session_id, meta: {robot, user_id, session_index, mode,
threshold, seed}}) which records the recall config a replay needs.
"""

from __future__ import annotations

import json
import os
import re
import threading
from collections import defaultdict
from pathlib import Path

from .errors import CorruptModelError, DataFileError
from .memory import (
    MemoryRecord,
    PropertyFamily,
    PropertyKey,
    RecordStatus,
    UserModel,
    Valence,
)

_SAFE_ID = re.compile(r"^[A-Za-z0-9._-]+$")

_RECORD_FIELDS = (
    "family",
    "param",
    "value",
    "probability",
    "status",
    "observed_valence",
    "session_observed",
)


def _check_id(value: str, what: str) -> str:
    if not _SAFE_ID.match(value):
        raise DataFileError(f"{what} {value!r} is not a safe path token")
    return value


def record_to_dict(record: MemoryRecord) -> dict:
    return {
        "family": record.key.family.value,
        "param": record.key.param,
        "value": record.value,
        "probability": record.probability,
        "status": record.status.value,
        "observed_valence": record.observed_valence.value if record.observed_valence else None,
        "session_observed": record.session_observed,
    }


def record_from_dict(raw: dict) -> MemoryRecord:
    missing = [name for name in _RECORD_FIELDS if name not in raw]
    if missing:
        raise CorruptModelError(f"record is missing fields {missing}")
    try:
        key = PropertyKey(PropertyFamily(raw["family"]), raw["param"])
        valence = Valence(raw["observed_valence"]) if raw["observed_valence"] else None
        return MemoryRecord(
            key=key,
            value=raw["value"],
            probability=raw["probability"],
            status=RecordStatus(raw["status"]),
            observed_valence=valence,
            session_observed=raw["session_observed"],
        )
    except Exception as exc:
        raise CorruptModelError(f"invalid record {raw!r}: {exc}") from exc


def model_to_dict(model: UserModel) -> dict:
    return {
        "schema_version": model.schema_version,
        "user_id": model.user_id,
        "robot": model.robot,
        "records": [record_to_dict(record) for record in model.sorted_records()],
    }


def model_from_dict(data: dict, user_id: str, robot: str) -> UserModel:
    if data.get("schema_version") != 1:
        raise CorruptModelError(f"unsupported schema_version {data.get('schema_version')!r}")
    if data.get("user_id") != user_id or data.get("robot") != robot:
        raise CorruptModelError(
            f"document belongs to ({data.get('user_id')}, {data.get('robot')}), "
            f"expected ({user_id}, {robot})"
        )
    records: dict[PropertyKey, MemoryRecord] = {}
    for raw in data.get("records", []):
        record = record_from_dict(raw)
        if record.key in records:
            raise CorruptModelError(f"duplicate record for {record.key.slot_id}")
        records[record.key] = record
    return UserModel(user_id=user_id, robot=robot, records=records)


class ModelStore:
    """Filesystem store; writes to any one (user, robot) pair are serialized."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self._guard = threading.Lock()
        self._locks: dict[tuple[str, str], threading.Lock] = defaultdict(threading.Lock)

    def lock_for(self, user_id: str, robot: str) -> threading.Lock:
        with self._guard:
            return self._locks[(user_id, robot)]

    def model_path(self, user_id: str, robot: str) -> Path:
        return self.root / _check_id(user_id, "user_id") / f"{_check_id(robot, 'robot')}.json"

    def log_path(self, user_id: str, robot: str) -> Path:
        return self.root / _check_id(user_id, "user_id") / f"{_check_id(robot, 'robot')}.log.jsonl"

    def load(self, user_id: str, robot: str) -> UserModel:
        """Load a model; a never-seen pair yields an empty model."""
        path = self.model_path(user_id, robot)
        if not path.exists():
            return UserModel(user_id=user_id, robot=robot)
        try:
            data = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptModelError(f"{path} is not valid JSON: {exc}") from exc
        return model_from_dict(data, user_id, robot)

    def save(self, model: UserModel) -> None:
        path = self.model_path(model.user_id, model.robot)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n"
        with self.lock_for(model.user_id, model.robot):
            tmp = path.with_suffix(".json.tmp")
            tmp.write_text(payload, "utf-8")
            os.replace(tmp, path)

    def append_log(self, user_id: str, robot: str, entry: dict) -> None:
        path = self.log_path(user_id, robot)
        path.parent.mkdir(parents=True, exist_ok=True)
        line = json.dumps(entry, separators=(",", ":"), sort_keys=True)
        with self.lock_for(user_id, robot):
            with path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def read_log(self, user_id: str, robot: str) -> list[dict]:
        path = self.log_path(user_id, robot)
        if not path.exists():
            return []
        entries = []
        for number, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                entries.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DataFileError(f"{path}:{number} is not valid JSON: {exc}") from exc
        return entries

    def completed_sessions(self, user_id: str, robot: str) -> int:
        """Sessions that reached their farewell; the next session index builds on this."""
        finished = set()
        for entry in self.read_log(user_id, robot):
            if entry.get("speaker") != "robot":
                continue
            kinds = {act.get("kind") for act in entry.get("acts", [])}
            if "Farewell" in kinds:
                finished.add(entry.get("session_id"))
        return len(finished)
