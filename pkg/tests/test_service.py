from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from personabot.dialogue import ActKind, DialogueEngine, Phase, SideChannel
from personabot.memory import Valence
from personabot.recall import RecallMode
from personabot.service.app import ServiceConfig, create_app
from personabot.store import ModelStore

ANSWERS = {
    "username": "Benedetta",
    "personal.profession": "student",
    "topic": "movies",
    "interest.cinema": "high",
    "favourite.film": "Tenet",
    "favourite.actor": "Leonardo DiCaprio",
    "favourite.director": "Christopher Nolan",
}
COLOR_REPLY = "sounds lovely"


@pytest.fixture
def client(tmp_path: Path):
    app = create_app(ServiceConfig(store_root=tmp_path / "store"))
    with TestClient(app) as test_client:
        yield test_client


def make_user(client, name="Benedetta") -> str:
    response = client.post("/users", json={"display_name": name})
    assert response.status_code == 201, response.text
    return response.json()["user_id"]


def answer_for(acts) -> str:
    prompt = acts[-1]
    slot = prompt["slots"].get("slot")
    return ANSWERS.get(slot, COLOR_REPLY)


def run_session(client, user_id, robot, side_channel=None):
    """Open a session and answer prompts until it closes; returns all act kinds."""
    response = client.post("/sessions", json={"user_id": user_id, "robot": robot})
    assert response.status_code == 201, response.text
    session = response.json()
    kinds = [act["kind"] for act in session["acts"]]
    phase = session["phase"]
    acts = session["acts"]
    first = True
    while phase != "closed":
        body = {"text": answer_for(acts)}
        if first and side_channel:
            body.update(side_channel)
        first = False
        response = client.post(f"/sessions/{session['session_id']}/messages", json=body)
        assert response.status_code == 200, response.text
        reply = response.json()
        kinds.extend(act["kind"] for act in reply["acts"])
        acts = reply["acts"] or acts
        phase = reply["phase"]
    return session["session_id"], kinds


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_personas_listing(client):
    personas = client.get("/personas").json()
    assert [p["robot_id"] for p in personas] == ["RoboTech", "SunnyBot", "MindStorm"]
    assert all(p["motto"] for p in personas)
    assert personas[0]["conscientiousness"] == 0.8


def test_create_user_requires_name(client):
    response = client.post("/users", json={"display_name": "  "})
    assert response.status_code == 400
    assert response.json()["code"] == "empty_value"


def test_same_display_name_gets_distinct_ids(client):
    assert make_user(client, "Ana") != make_user(client, "Ana")


def test_open_session_unknown_user(client):
    response = client.post("/sessions", json={"user_id": "u-missing", "robot": "SunnyBot"})
    assert response.status_code == 404
    assert response.json()["code"] == "unknown_user"


def test_open_session_unknown_robot(client):
    user_id = make_user(client)
    response = client.post("/sessions", json={"user_id": user_id, "robot": "Pepper"})
    assert response.status_code == 404
    assert response.json()["code"] == "unknown_robot"


def test_first_session_flow_and_model(client):
    user_id = make_user(client)
    session_id, kinds = run_session(
        client,
        user_id,
        "SunnyBot",
        side_channel={"emotion_valence": "neutral", "attire": {"color": "blue"}},
    )
    assert "Farewell" in kinds
    records = client.get(f"/users/{user_id}/models/SunnyBot").json()["records"]
    by_family = {(r["family"], r["param"]): r for r in records}
    assert by_family[("username", None)]["probability"] == 0.8
    assert by_family[("username", None)]["status"] == "stored"
    assert by_family[("personal", "profession")]["probability"] == 0.4
    assert by_family[("emotion", None)]["value"] == "positive"
    transcript = client.get(f"/sessions/{session_id}/transcript").json()
    speakers = [turn["speaker"] for turn in transcript["turns"]]
    assert speakers[0] == "robot"
    assert speakers == ["robot" if i % 2 == 0 else "user" for i in range(len(speakers))]
    assert transcript["turns"][-1]["acts"][-1]["kind"] == "Farewell"


def test_second_session_recall_statuses(client):
    user_id = make_user(client)
    run_session(
        client,
        user_id,
        "SunnyBot",
        side_channel={"emotion_valence": "neutral", "attire": {"color": "blue"}},
    )
    response = client.post("/sessions", json={"user_id": user_id, "robot": "SunnyBot"})
    session = response.json()
    assert session["session_index"] == 2
    assert session["acts"][0]["kind"] == "GreetWithName"
    records = client.get(f"/users/{user_id}/models/SunnyBot").json()["records"]
    by_family = {(r["family"], r["param"]): r for r in records}
    assert by_family[("username", None)]["status"] == "remembered"
    assert by_family[("personal", "profession")]["status"] == "forgotten"


def test_open_conflict(client):
    user_id = make_user(client)
    first = client.post("/sessions", json={"user_id": user_id, "robot": "SunnyBot"})
    assert first.status_code == 201
    second = client.post("/sessions", json={"user_id": user_id, "robot": "SunnyBot"})
    assert second.status_code == 409
    body = second.json()
    assert body["code"] == "session_conflict"
    assert body["session_id"] == first.json()["session_id"]
    # A different robot for the same user is fine.
    third = client.post("/sessions", json={"user_id": user_id, "robot": "RoboTech"})
    assert third.status_code == 201


def test_concurrent_opens_admit_exactly_one(client):
    user_id = make_user(client)

    def attempt(_):
        return client.post(
            "/sessions", json={"user_id": user_id, "robot": "MindStorm"}
        ).status_code

    with ThreadPoolExecutor(max_workers=8) as pool:
        codes = list(pool.map(attempt, range(8)))
    assert codes.count(201) == 1
    assert codes.count(409) == 7


def test_message_to_unknown_and_closed_sessions(client):
    response = client.post("/sessions/nope/messages", json={"text": "hi"})
    assert response.status_code == 404
    user_id = make_user(client)
    session_id, _ = run_session(client, user_id, "SunnyBot")
    response = client.post(f"/sessions/{session_id}/messages", json={"text": "hi"})
    assert response.status_code == 409
    assert response.json()["code"] == "session_closed"


def test_closed_session_frees_the_pair(client):
    user_id = make_user(client)
    run_session(client, user_id, "SunnyBot")
    response = client.post("/sessions", json={"user_id": user_id, "robot": "SunnyBot"})
    assert response.status_code == 201


def test_model_view_for_fresh_pair_is_empty(client):
    user_id = make_user(client)
    records = client.get(f"/users/{user_id}/models/MindStorm").json()["records"]
    assert records == []


def test_transcript_of_open_session(client):
    user_id = make_user(client)
    response = client.post("/sessions", json={"user_id": user_id, "robot": "RoboTech"})
    session_id = response.json()["session_id"]
    transcript = client.get(f"/sessions/{session_id}/transcript").json()
    assert len(transcript["turns"]) == 1
    assert transcript["turns"][0]["speaker"] == "robot"
    assert client.get("/sessions/unknown/transcript").status_code == 404


def test_config_overrides_accepted(client):
    user_id = make_user(client)
    response = client.post(
        "/sessions",
        json={
            "user_id": user_id,
            "robot": "SunnyBot",
            "config": {"mode": "stochastic", "threshold": 0.5, "seed": 42},
        },
    )
    assert response.status_code == 201


def test_api_matches_engine_golden(tmp_path):
    """The service is a thin wrapper: engine-level and API-level runs agree."""
    engine_store = ModelStore(tmp_path / "engine")
    engine = DialogueEngine(engine_store)
    side = SideChannel(emotion_valence=Valence.NEUTRAL, attire={"color": "blue"})
    state, acts, text = engine.start_session("benedetta", "SunnyBot")
    engine_texts = [text]
    engine_kinds = [act.kind.value for act in acts]
    first = True
    while state.phase is not Phase.CLOSED:
        slot = state.awaiting.slots.get("slot")
        reply = ANSWERS.get(slot, COLOR_REPLY)
        state, acts, text = engine.step(state, reply, side if first else None)
        first = False
        engine_texts.append(text)
        engine_kinds.extend(act.kind.value for act in acts)

    app = create_app(ServiceConfig(store_root=tmp_path / "api"))
    with TestClient(app) as client:
        user_id = make_user(client)
        response = client.post("/sessions", json={"user_id": user_id, "robot": "SunnyBot"})
        session = response.json()
        api_texts = [session["text"]]
        api_kinds = [act["kind"] for act in session["acts"]]
        acts = session["acts"]
        phase = session["phase"]
        first = True
        while phase != "closed":
            body = {"text": answer_for(acts)}
            if first:
                body.update({"emotion_valence": "neutral", "attire": {"color": "blue"}})
            first = False
            reply = client.post(
                f"/sessions/{session['session_id']}/messages", json=body
            ).json()
            api_texts.append(reply["text"])
            api_kinds.extend(act["kind"] for act in reply["acts"])
            acts = reply["acts"] or acts
            phase = reply["phase"]
    assert api_texts == engine_texts
    assert api_kinds == engine_kinds
