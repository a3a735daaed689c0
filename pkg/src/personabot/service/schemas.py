"""Request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class CreateUserRequest(BaseModel):
    display_name: str


class UserResponse(BaseModel):
    user_id: str
    display_name: str


class RecallOverrides(BaseModel):
    mode: Optional[Literal["threshold", "stochastic"]] = None
    threshold: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)


class OpenSessionRequest(BaseModel):
    user_id: str
    robot: str
    config: Optional[RecallOverrides] = None


class ActView(BaseModel):
    kind: str
    slots: dict[str, str] = Field(default_factory=dict)


class SessionResponse(BaseModel):
    session_id: str
    user_id: str
    robot: str
    session_index: int
    created_at: str
    phase: str
    acts: list[ActView]
    text: str


class MessageRequest(BaseModel):
    text: str
    emotion_valence: Optional[Literal["positive", "neutral", "negative"]] = None
    attire: Optional[dict[str, str]] = None


class MessageResponse(BaseModel):
    text: str
    acts: list[ActView]
    phase: str


class RecordView(BaseModel):
    family: str
    param: Optional[str]
    value: str
    probability: float
    status: str
    observed_valence: Optional[str]
    session_observed: int


class ModelResponse(BaseModel):
    user_id: str
    robot: str
    records: list[RecordView]


class TurnView(BaseModel):
    turn: int
    speaker: str
    text: str
    acts: list[ActView]
    side_channel: Optional[dict] = None


class TranscriptResponse(BaseModel):
    session_id: str
    user_id: str
    robot: str
    turns: list[TurnView]


class PersonaView(BaseModel):
    robot_id: str
    motto: str
    extraversion: float
    agreeableness: float
    neuroticism: float
    conscientiousness: float
    openness: float


class HealthResponse(BaseModel):
    status: str
