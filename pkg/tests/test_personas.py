from __future__ import annotations

import json

import pytest

from personabot.errors import DataFileError, UnknownRobotError
from personabot.personas import (
    HIGH_TRAIT,
    get_persona,
    load_personas,
    style_params,
)

# The three built-in trait vectors, locked bit-exact.
BUILTIN_TRAITS = {
    "RoboTech": {
        "extraversion": 0.5,
        "agreeableness": 0.4,
        "neuroticism": 0.3,
        "conscientiousness": 0.8,
        "openness": 0.2,
    },
    "SunnyBot": {
        "extraversion": 0.8,
        "agreeableness": 0.8,
        "neuroticism": 0.2,
        "conscientiousness": 0.3,
        "openness": 0.4,
    },
    "MindStorm": {
        "extraversion": 0.3,
        "agreeableness": 0.3,
        "neuroticism": 0.8,
        "conscientiousness": 0.3,
        "openness": 0.7,
    },
}


@pytest.mark.parametrize("robot", sorted(BUILTIN_TRAITS))
def test_builtin_trait_weights_are_exact(robot):
    profile = get_persona(robot)
    for trait, weight in BUILTIN_TRAITS[robot].items():
        assert getattr(profile, trait) == weight


def test_every_trait_weight_in_unit_interval():
    for robot in BUILTIN_TRAITS:
        profile = get_persona(robot)
        for trait in BUILTIN_TRAITS[robot]:
            assert 0.0 <= getattr(profile, trait) <= 1.0


def test_unknown_robot_rejected():
    with pytest.raises(UnknownRobotError):
        get_persona("Pepper")


def test_mottoes_are_distinct_and_nonempty():
    mottoes = {get_persona(robot).motto for robot in BUILTIN_TRAITS}
    assert len(mottoes) == 3
    assert all(mottoes)


def test_sunnybot_preferences_fixed():
    assert get_persona("SunnyBot").preferences == frozenset(
        {("genre", "science fiction"), ("actor", "leonardo dicaprio")}
    )


def test_other_personas_have_empty_preferences():
    assert get_persona("RoboTech").preferences == frozenset()
    assert get_persona("MindStorm").preferences == frozenset()


def test_style_flags_follow_threshold_rule():
    for robot in BUILTIN_TRAITS:
        profile = get_persona(robot)
        style = style_params(profile)
        assert style.detail_probing == (profile.conscientiousness >= HIGH_TRAIT)
        assert style.motivation_probing == (profile.openness >= HIGH_TRAIT)
        assert style.self_disclosure == (profile.extraversion >= HIGH_TRAIT)
        assert style.preference_mirroring == (profile.agreeableness >= HIGH_TRAIT)
        assert style.hedged_recall == (profile.neuroticism >= HIGH_TRAIT)


def test_builtin_style_contrasts():
    robotech = style_params(get_persona("RoboTech"))
    sunnybot = style_params(get_persona("SunnyBot"))
    mindstorm = style_params(get_persona("MindStorm"))
    assert (robotech.detail_probing, robotech.motivation_probing) == (True, False)
    assert not any(
        [robotech.self_disclosure, robotech.preference_mirroring, robotech.hedged_recall]
    )
    assert (sunnybot.self_disclosure, sunnybot.preference_mirroring) == (True, True)
    assert not any([sunnybot.detail_probing, sunnybot.motivation_probing, sunnybot.hedged_recall])
    assert (mindstorm.motivation_probing, mindstorm.hedged_recall) == (True, True)
    assert not any(
        [mindstorm.detail_probing, mindstorm.self_disclosure, mindstorm.preference_mirroring]
    )
    # Exactly one detail prober and one hedger among the built-ins.
    styles = [robotech, sunnybot, mindstorm]
    assert sum(s.detail_probing for s in styles) == 1
    assert sum(s.hedged_recall for s in styles) == 1


def test_style_params_is_pure():
    profile = get_persona("MindStorm")
    assert style_params(profile) == style_params(profile)


def test_out_of_range_trait_rejected(tmp_path):
    bad = [
        {
            "robot_id": "RoboTech",
            "extraversion": 1.2,
            "agreeableness": 0.4,
            "neuroticism": 0.3,
            "conscientiousness": 0.8,
            "openness": 0.2,
            "motto": "x",
            "preferences": [],
        }
    ]
    path = tmp_path / "personas.json"
    path.write_text(json.dumps(bad))
    with pytest.raises(DataFileError):
        load_personas(path)


def test_duplicate_persona_rejected(tmp_path):
    entry = {
        "robot_id": "RoboTech",
        "extraversion": 0.5,
        "agreeableness": 0.4,
        "neuroticism": 0.3,
        "conscientiousness": 0.8,
        "openness": 0.2,
        "motto": "x",
        "preferences": [],
    }
    path = tmp_path / "personas.json"
    path.write_text(json.dumps([entry, entry]))
    with pytest.raises(DataFileError):
        load_personas(path)
