"""Small movie-domain knowledge base backing recommendations and shared-preference talk."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DataFileError
from .memory import normalize_value

ENTITY_TYPES = ("director", "actor", "film", "genre")

# relation name -> (entity type it lives on, entity type it points at)
_RELATION_SHAPE = {
    "directed_by": ("film", "director"),
    "acted_in": ("actor", "film"),
    "has_genre": ("film", "genre"),
    "upcoming": ("actor", "film"),
}


@dataclass(frozen=True)
class KbEntry:
    entity_type: str
    name: str
    relations: tuple[tuple[str, str], ...]

    def targets(self, relation: str) -> list[str]:
        return sorted(target for rel, target in self.relations if rel == relation)


@dataclass(frozen=True)
class Recommendation:
    film: str
    reason: str
    detail: dict[str, str]


class KnowledgeBase:
    def __init__(self, entries: list[KbEntry]):
        self._entries = {(e.entity_type, e.name): e for e in entries}
        self._validate()

    def _validate(self) -> None:
        for entry in self._entries.values():
            for relation, target in entry.relations:
                shape = _RELATION_SHAPE.get(relation)
                if shape is None:
                    raise DataFileError(f"{entry.name}: unknown relation {relation!r}")
                source_type, target_type = shape
                if entry.entity_type != source_type:
                    raise DataFileError(
                        f"{entry.name}: relation {relation} belongs on {source_type} entries"
                    )
                if (target_type, target) not in self._entries:
                    raise DataFileError(
                        f"{entry.name}: relation {relation} points at missing {target_type} {target!r}"
                    )

    def lookup(self, entity_type: str, name: str) -> KbEntry | None:
        return self._entries.get((entity_type, normalize_value(name)))

    def entries(self, entity_type: str) -> list[KbEntry]:
        return sorted(
            (e for e in self._entries.values() if e.entity_type == entity_type),
            key=lambda e: e.name,
        )

    def films_by_director(self, director: str) -> list[str]:
        return sorted(
            e.name
            for e in self.entries("film")
            if director in e.targets("directed_by")
        )

    def genres_of(self, film: str) -> set[str]:
        entry = self.lookup("film", film)
        return set(entry.targets("has_genre")) if entry else set()


def recommend(
    kb: KnowledgeBase, favourites: set[tuple[str, str]]
) -> Recommendation | None:
    """Pick a film the user has not named, preferring their favourite director's work.

    Deterministic: candidate films are tie-broken lexicographically, and the
    reason cites a genre overlap with the user's favourite film when one exists.
    Falls back to an upcoming film of the favourite named actor; None otherwise.
    """
    named_films = {value for category, value in favourites if category == "film"}
    directors = sorted(value for category, value in favourites if category == "director")
    for director in directors:
        candidates = [f for f in kb.films_by_director(director) if f not in named_films]
        if not candidates:
            continue
        film = candidates[0]
        shared_genres = set()
        for named in sorted(named_films):
            shared_genres |= kb.genres_of(film) & kb.genres_of(named)
        if shared_genres:
            detail = {"director": director, "genre": sorted(shared_genres)[0]}
            return Recommendation(film, "genre_match", detail)
        return Recommendation(film, "favourite_director", {"director": director})
    actors = sorted(value for category, value in favourites if category == "actor")
    for actor in actors:
        entry = kb.lookup("actor", actor)
        if entry is None:
            continue
        upcoming = [f for f in entry.targets("upcoming") if f not in named_films]
        if upcoming:
            return Recommendation(upcoming[0], "upcoming_with_favourite_actor", {"actor": actor})
    return None


def load_kb(path: Path | None = None) -> KnowledgeBase:
    """Load a knowledge-base file; defaults to the bundled seed."""
    if path is None:
        text = resources.files("personabot.data").joinpath("movies.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        raw_entries = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFileError(f"knowledge base is not valid JSON: {exc}") from exc
    entries = []
    for raw in raw_entries:
        try:
            entity_type = raw["entity_type"]
            if entity_type not in ENTITY_TYPES:
                raise DataFileError(f"unknown entity type {entity_type!r}")
            entries.append(
                KbEntry(
                    entity_type=entity_type,
                    name=normalize_value(raw["name"]),
                    relations=tuple(
                        (rel["relation"], normalize_value(rel["target"]))
                        for rel in raw.get("relations", [])
                    ),
                )
            )
        except (KeyError, TypeError) as exc:
            raise DataFileError(f"malformed knowledge-base entry {raw!r}") from exc
    return KnowledgeBase(entries)
