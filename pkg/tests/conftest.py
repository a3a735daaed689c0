from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from personabot.dialogue import DialogueEngine
from personabot.simulate import UserScript, load_script
from personabot.store import ModelStore


@pytest.fixture
def store(tmp_path: Path) -> ModelStore:
    return ModelStore(tmp_path / "store")


@pytest.fixture
def engine(store: ModelStore) -> DialogueEngine:
    return DialogueEngine(store)


@pytest.fixture(scope="session")
def canonical_script_path() -> Path:
    return Path(str(resources.files("personabot.data").joinpath("canonical_user.json")))


@pytest.fixture(scope="session")
def canonical_script(canonical_script_path: Path) -> UserScript:
    return load_script(canonical_script_path)
