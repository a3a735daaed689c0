from __future__ import annotations

import json

import pytest

from personabot.errors import DataFileError
from personabot.kb import load_kb, recommend


@pytest.fixture(scope="module")
def kb():
    return load_kb()


def test_lookup_exact_and_case_insensitive(kb):
    entry = kb.lookup("film", "tenet")
    assert entry is not None
    assert "science fiction" in entry.targets("has_genre")
    assert kb.lookup("actor", "Leonardo DiCaprio") is not None
    assert kb.lookup("director", "unknown person") is None


def test_seed_contents(kb):
    nolan_films = kb.films_by_director("christopher nolan")
    assert set(nolan_films) >= {"interstellar", "tenet"}
    assert kb.genres_of("interstellar") == {"science fiction"}
    assert kb.genres_of("tenet") == {"science fiction"}
    dicaprio = kb.lookup("actor", "leonardo dicaprio")
    assert "killers of the flower moon" in dicaprio.targets("upcoming")


def test_recommend_from_favourite_director(kb):
    favourites = {("director", "christopher nolan"), ("film", "tenet")}
    suggestion = recommend(kb, favourites)
    assert suggestion is not None
    assert suggestion.film == "interstellar"
    assert suggestion.reason == "genre_match"
    assert suggestion.detail["genre"] == "science fiction"


def test_recommend_upcoming_with_favourite_actor(kb):
    suggestion = recommend(kb, {("actor", "leonardo dicaprio")})
    assert suggestion is not None
    assert suggestion.film == "killers of the flower moon"
    assert suggestion.reason == "upcoming_with_favourite_actor"


def test_recommend_nothing_without_favourites(kb):
    assert recommend(kb, set()) is None


def test_recommend_never_repeats_a_named_favourite(kb):
    for film_entry in kb.entries("film"):
        favourites = {
            ("director", "christopher nolan"),
            ("actor", "leonardo dicaprio"),
            ("film", film_entry.name),
        }
        suggestion = recommend(kb, favourites)
        if suggestion is not None:
            assert suggestion.film != film_entry.name


def test_recommend_is_deterministic(kb):
    favourites = {("director", "christopher nolan"), ("film", "tenet")}
    first = recommend(kb, favourites)
    second = recommend(kb, favourites)
    assert first == second


def test_director_route_wins_over_actor_route(kb):
    favourites = {
        ("director", "christopher nolan"),
        ("actor", "leonardo dicaprio"),
        ("film", "tenet"),
    }
    suggestion = recommend(kb, favourites)
    assert suggestion.film == "interstellar"


def test_dangling_relation_rejected(tmp_path):
    entries = [
        {"entity_type": "film", "name": "ghost", "relations": [
            {"relation": "directed_by", "target": "nobody"}
        ]}
    ]
    path = tmp_path / "kb.json"
    path.write_text(json.dumps(entries))
    with pytest.raises(DataFileError):
        load_kb(path)


def test_relation_on_wrong_entity_type_rejected(tmp_path):
    entries = [
        {"entity_type": "director", "name": "someone", "relations": [
            {"relation": "has_genre", "target": "drama"}
        ]},
        {"entity_type": "genre", "name": "drama", "relations": []},
    ]
    path = tmp_path / "kb.json"
    path.write_text(json.dumps(entries))
    with pytest.raises(DataFileError):
        load_kb(path)
