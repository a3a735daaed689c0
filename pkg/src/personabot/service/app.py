"""HTTP service exposing users, sessions, messages and model inspection.

Handlers stay thin: every behaviour lives in the dialogue engine, the store
or the persona registry; the service only validates input, routes calls and
keeps the session registry. Errors come back as {code, message} bodies with
stable codes.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.requests import Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..dialogue import DialogueEngine, DialogueState, Phase, SideChannel
from ..errors import (
    CorruptModelError,
    EmptyValueError,
    PersonabotError,
    SessionClosedError,
    SessionConflictError,
    UnknownSessionError,
    UnknownUserError,
)
from ..memory import ROBOTS, Valence, require_robot
from ..personas import builtin_personas
from ..recall import RecallConfig, RecallMode
from ..store import ModelStore, model_to_dict
from . import schemas

_STATUS_BY_ERROR = {
    "unknown_robot": 404,
    "unknown_user": 404,
    "unknown_session": 404,
    "session_conflict": 409,
    "session_closed": 409,
    "corrupt_model": 500,
}


@dataclass(frozen=True)
class ServiceConfig:
    store_root: Path = Path("store")
    mode: RecallMode = RecallMode.THRESHOLD
    threshold: float = 0.7
    seed: int = 0
    frontend_dist: Path | None = None

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        frontend = os.environ.get("PERSONABOT_FRONTEND")
        return cls(
            store_root=Path(os.environ.get("PERSONABOT_STORE", "store")),
            mode=RecallMode(os.environ.get("PERSONABOT_MODE", "threshold")),
            threshold=float(os.environ.get("PERSONABOT_THRESHOLD", "0.7")),
            seed=int(os.environ.get("PERSONABOT_SEED", "0")),
            frontend_dist=Path(frontend) if frontend else None,
        )


class UserDirectory:
    """Users registry persisted as users.json under the store root."""

    def __init__(self, root: Path):
        self._path = root / "users.json"
        self._lock = threading.Lock()

    def _read(self) -> dict:
        if not self._path.exists():
            return {}
        return json.loads(self._path.read_text("utf-8"))

    def create(self, display_name: str) -> str:
        if not display_name.strip():
            raise EmptyValueError("display_name must not be empty")
        user_id = f"u-{uuid.uuid4().hex[:12]}"
        with self._lock:
            users = self._read()
            users[user_id] = {
                "display_name": display_name.strip(),
                "created_at": datetime.now(timezone.utc).isoformat(),
            }
            self._path.parent.mkdir(parents=True, exist_ok=True)
            self._path.write_text(json.dumps(users, indent=2, sort_keys=True) + "\n", "utf-8")
        return user_id

    def require(self, user_id: str) -> dict:
        users = self._read()
        if user_id not in users:
            raise UnknownUserError(f"unknown user {user_id!r}")
        return users[user_id]


@dataclass
class SessionEntry:
    state: DialogueState
    created_at: str
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionRegistry:
    """In-memory session index enforcing one open session per (user, robot)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_id: dict[str, SessionEntry] = {}
        self._open_pairs: dict[tuple[str, str], str] = {}

    def reserve(self, user_id: str, robot: str) -> None:
        with self._lock:
            existing = self._open_pairs.get((user_id, robot))
            if existing is not None:
                raise SessionConflictError(
                    f"session {existing} is already open for ({user_id}, {robot})",
                    session_id=existing,
                )
            self._open_pairs[(user_id, robot)] = "pending"

    def commit(self, entry: SessionEntry) -> None:
        state = entry.state
        with self._lock:
            self._by_id[state.session_id] = entry
            if state.phase is Phase.CLOSED:
                self._open_pairs.pop((state.user_id, state.robot), None)
            else:
                self._open_pairs[(state.user_id, state.robot)] = state.session_id

    def rollback(self, user_id: str, robot: str) -> None:
        with self._lock:
            if self._open_pairs.get((user_id, robot)) == "pending":
                del self._open_pairs[(user_id, robot)]

    def release_if_closed(self, entry: SessionEntry) -> None:
        state = entry.state
        if state.phase is Phase.CLOSED:
            with self._lock:
                if self._open_pairs.get((state.user_id, state.robot)) == state.session_id:
                    del self._open_pairs[(state.user_id, state.robot)]

    def get(self, session_id: str) -> SessionEntry:
        with self._lock:
            entry = self._by_id.get(session_id)
        if entry is None:
            raise UnknownSessionError(f"unknown session {session_id!r}")
        return entry


def _act_views(acts) -> list[schemas.ActView]:
    return [schemas.ActView(kind=act.kind.value, slots=dict(act.slots)) for act in acts]


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    store = ModelStore(config.store_root)
    engine = DialogueEngine(store)
    users = UserDirectory(config.store_root)
    registry = SessionRegistry()
    defaults = RecallConfig(mode=config.mode, threshold=config.threshold, seed=config.seed)

    app = FastAPI(title="personabot", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(PersonabotError)
    async def handle_package_error(request: Request, exc: PersonabotError):
        status = _STATUS_BY_ERROR.get(exc.code, 400)
        body = {"code": exc.code, "message": str(exc)}
        if isinstance(exc, SessionConflictError) and exc.session_id:
            body["session_id"] = exc.session_id
        return JSONResponse(status_code=status, content=body)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok")

    @app.get("/personas", response_model=list[schemas.PersonaView])
    def personas():
        profiles = builtin_personas()
        return [
            schemas.PersonaView(
                robot_id=profile.robot_id,
                motto=profile.motto,
                extraversion=profile.extraversion,
                agreeableness=profile.agreeableness,
                neuroticism=profile.neuroticism,
                conscientiousness=profile.conscientiousness,
                openness=profile.openness,
            )
            for robot in ROBOTS
            for profile in [profiles[robot]]
        ]

    @app.post("/users", response_model=schemas.UserResponse, status_code=201)
    def create_user(request: schemas.CreateUserRequest):
        user_id = users.create(request.display_name)
        return schemas.UserResponse(user_id=user_id, display_name=request.display_name.strip())

    @app.post("/sessions", response_model=schemas.SessionResponse, status_code=201)
    def open_session(request: schemas.OpenSessionRequest):
        users.require(request.user_id)
        require_robot(request.robot)
        overrides = request.config or schemas.RecallOverrides()
        session_config = RecallConfig(
            mode=RecallMode(overrides.mode) if overrides.mode else defaults.mode,
            threshold=overrides.threshold if overrides.threshold is not None else defaults.threshold,
            seed=overrides.seed if overrides.seed is not None else defaults.seed,
        )
        registry.reserve(request.user_id, request.robot)
        try:
            state, acts, text = engine.start_session(
                request.user_id, request.robot, session_config
            )
        except Exception:
            registry.rollback(request.user_id, request.robot)
            raise
        entry = SessionEntry(state=state, created_at=datetime.now(timezone.utc).isoformat())
        registry.commit(entry)
        return schemas.SessionResponse(
            session_id=state.session_id,
            user_id=state.user_id,
            robot=state.robot,
            session_index=state.session_index,
            created_at=entry.created_at,
            phase=state.phase.value,
            acts=_act_views(acts),
            text=text,
        )

    @app.post("/sessions/{session_id}/messages", response_model=schemas.MessageResponse)
    def post_message(session_id: str, request: schemas.MessageRequest):
        entry = registry.get(session_id)
        with entry.lock:
            if entry.state.phase is Phase.CLOSED:
                raise SessionClosedError(f"session {session_id} is closed")
            side = SideChannel(
                emotion_valence=Valence(request.emotion_valence)
                if request.emotion_valence
                else None,
                attire=request.attire,
            )
            state, acts, text = engine.step(entry.state, request.text, side)
            entry.state = state
        registry.release_if_closed(entry)
        return schemas.MessageResponse(text=text, acts=_act_views(acts), phase=state.phase.value)

    @app.get("/users/{user_id}/models/{robot}", response_model=schemas.ModelResponse)
    def get_model(user_id: str, robot: str):
        users.require(user_id)
        require_robot(robot)
        model = store.load(user_id, robot)
        data = model_to_dict(model)
        return schemas.ModelResponse(
            user_id=user_id,
            robot=robot,
            records=[schemas.RecordView(**record) for record in data["records"]],
        )

    @app.get("/sessions/{session_id}/transcript", response_model=schemas.TranscriptResponse)
    def get_transcript(session_id: str):
        entry = registry.get(session_id)
        state = entry.state
        turns = [
            schemas.TurnView(
                turn=line["turn"],
                speaker=line["speaker"],
                text=line["text"],
                acts=[schemas.ActView(**act) for act in line["acts"]],
                side_channel=line.get("side_channel"),
            )
            for line in store.read_log(state.user_id, state.robot)
            if line.get("session_id") == session_id and "turn" in line
        ]
        return schemas.TranscriptResponse(
            session_id=session_id, user_id=state.user_id, robot=state.robot, turns=turns
        )

    if config.frontend_dist and config.frontend_dist.is_dir():
        app.mount("/ui", StaticFiles(directory=config.frontend_dist, html=True), name="ui")

    return app


def default_app() -> FastAPI:
    return create_app(ServiceConfig.from_env())
