from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from personabot.errors import CorruptModelError, DataFileError
from personabot.memory import (
    MemoryRecord,
    PropertyFamily,
    PropertyKey,
    RecordStatus,
    UserModel,
    Valence,
)
from personabot.store import ModelStore, model_to_dict

PARAM_FOR = {
    PropertyFamily.PERSONAL: "profession",
    PropertyFamily.INTEREST: "cinema",
    PropertyFamily.FAVOURITE: "film",
    PropertyFamily.SHARED_FAVOURITE: "actor",
    PropertyFamily.ATTIRE: "color",
}


@st.composite
def models(draw):
    families = draw(
        st.lists(st.sampled_from(list(PropertyFamily)), min_size=0, max_size=8, unique=True)
    )
    model = UserModel(user_id="hypo-user", robot=draw(st.sampled_from(["RoboTech", "SunnyBot", "MindStorm"])))
    for family in families:
        key = PropertyKey(family, PARAM_FOR.get(family))
        if family is PropertyFamily.EMOTION:
            observed = draw(st.sampled_from(list(Valence)))
            value = draw(st.sampled_from(list(Valence))).value
        else:
            observed = None
            value = draw(st.sampled_from(["high", "blue", "tenet", "student", "movies"]))
            if family is PropertyFamily.INTEREST:
                value = draw(st.sampled_from(["low", "medium", "high"]))
        model.records[key] = MemoryRecord(
            key=key,
            value=value,
            probability=draw(st.floats(min_value=0.0, max_value=1.0, allow_nan=False)),
            status=draw(st.sampled_from(list(RecordStatus))),
            observed_valence=observed,
            session_observed=draw(st.integers(min_value=1, max_value=5)),
        )
    return model


@given(models())
def test_save_load_round_trip_is_identical(model):
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        store = ModelStore(tmp)
        store.save(model)
        loaded = store.load(model.user_id, model.robot)
        assert loaded.records == model.records
        assert loaded.user_id == model.user_id
        assert loaded.robot == model.robot
        assert loaded.schema_version == model.schema_version


def test_missing_model_loads_empty(store):
    model = store.load("nobody", "SunnyBot")
    assert model.records == {}
    assert model.user_id == "nobody"


def test_save_is_deterministic(store):
    key = PropertyKey(PropertyFamily.USERNAME)
    model = UserModel(user_id="sam", robot="SunnyBot")
    model.records[key] = MemoryRecord(key, "sam", 0.8, RecordStatus.STORED, None, 1)
    store.save(model)
    first = store.model_path("sam", "SunnyBot").read_bytes()
    store.save(model)
    assert store.model_path("sam", "SunnyBot").read_bytes() == first


def _write_model(store, payload):
    path = store.model_path("sam", "SunnyBot")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload))


def _valid_document():
    key = PropertyKey(PropertyFamily.USERNAME)
    model = UserModel(user_id="sam", robot="SunnyBot")
    model.records[key] = MemoryRecord(key, "sam", 0.8, RecordStatus.STORED, None, 1)
    return model_to_dict(model)


def test_load_rejects_out_of_range_probability(store):
    payload = _valid_document()
    payload["records"][0]["probability"] = 1.3
    _write_model(store, payload)
    with pytest.raises(CorruptModelError):
        store.load("sam", "SunnyBot")


def test_load_rejects_unknown_family(store):
    payload = _valid_document()
    payload["records"][0]["family"] = "nickname"
    _write_model(store, payload)
    with pytest.raises(CorruptModelError):
        store.load("sam", "SunnyBot")


def test_load_rejects_duplicate_keys(store):
    payload = _valid_document()
    payload["records"].append(dict(payload["records"][0]))
    _write_model(store, payload)
    with pytest.raises(CorruptModelError):
        store.load("sam", "SunnyBot")


def test_load_rejects_identity_mismatch(store):
    payload = _valid_document()
    payload["user_id"] = "someone-else"
    _write_model(store, payload)
    with pytest.raises(CorruptModelError):
        store.load("sam", "SunnyBot")


def test_load_rejects_bad_schema_version(store):
    payload = _valid_document()
    payload["schema_version"] = 99
    _write_model(store, payload)
    with pytest.raises(CorruptModelError):
        store.load("sam", "SunnyBot")


def test_unsafe_ids_rejected(store):
    with pytest.raises(DataFileError):
        store.model_path("../evil", "SunnyBot")


def test_log_append_and_read(store):
    store.append_log("sam", "SunnyBot", {"session_id": "s1", "meta": {"seed": 0}})
    store.append_log(
        "sam",
        "SunnyBot",
        {"session_id": "s1", "turn": 1, "speaker": "robot", "text": "hi", "acts": [], "side_channel": None},
    )
    entries = store.read_log("sam", "SunnyBot")
    assert len(entries) == 2
    assert entries[0]["meta"] == {"seed": 0}
    assert entries[1]["turn"] == 1


def test_completed_sessions_counts_farewells(store):
    assert store.completed_sessions("sam", "SunnyBot") == 0
    turn = {
        "session_id": "s1",
        "turn": 4,
        "speaker": "robot",
        "text": "bye",
        "acts": [{"kind": "Farewell", "slots": {}}],
        "side_channel": None,
    }
    store.append_log("sam", "SunnyBot", turn)
    assert store.completed_sessions("sam", "SunnyBot") == 1
    # The same session's farewell twice still counts once.
    store.append_log("sam", "SunnyBot", turn)
    assert store.completed_sessions("sam", "SunnyBot") == 1
    store.append_log("sam", "SunnyBot", dict(turn, session_id="s2"))
    assert store.completed_sessions("sam", "SunnyBot") == 2
    # A user farewell line never counts.
    store.append_log(
        "sam",
        "SunnyBot",
        {"session_id": "s3", "turn": 1, "speaker": "user", "text": "bye", "acts": [], "side_channel": None},
    )
    assert store.completed_sessions("sam", "SunnyBot") == 2
