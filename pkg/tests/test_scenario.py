"""Config parsing, validation, and round-trip behavior."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edge_epirisk.scenario import (
    ConfigError,
    McSettings,
    RandomDirection,
    RandomWalk,
    RandomWaypoint,
    ScenarioConfig,
    Static,
    ValidationError,
    parse_config,
    serialize_config,
    validate,
)


def test_parse_basic_document_applies_volume_defaults():
    cfg = parse_config(
        """
        # scenario
        radius = 100
        n_infected = 20
        path_loss = 2
        vol_threshold = 0.1
        mobility.model = static
        """
    )
    assert cfg.radius == 100
    assert cfg.n_infected == 20
    assert cfg.path_loss == 2
    assert cfg.vol_threshold == 0.1
    assert isinstance(cfg.mobility, Static)
    assert cfg.vol_min == 0.5
    assert cfg.vol_max == 1.5


def test_parse_empty_document_gives_defaults():
    cfg = parse_config("")
    assert cfg.radius == 100
    assert cfg.n_infected == 20
    assert cfg.path_loss == 2.5
    assert isinstance(cfg.mobility, Static)
    assert validate(cfg) == []


def test_parse_rejects_inverted_volume_band():
    with pytest.raises(ValidationError) as err:
        parse_config("vol_min = 2\nvol_max = 1\n")
    assert any("vol_min < vol_max" in v for v in err.value.violations)


def test_parse_error_carries_line_and_key_context():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("radius = 10\nwhat is this\n")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("radius = 10\nbogus = 1\n")
    with pytest.raises(ConfigError, match="not a number"):
        parse_config("radius = ten\n")
    with pytest.raises(ConfigError, match="mobility.model"):
        parse_config("mobility.model = teleport\n")


def test_strict_mode_requires_scenario_keys():
    with pytest.raises(ConfigError, match="missing required keys"):
        parse_config("radius = 10\n", strict=True)
    cfg = parse_config(
        "radius = 10\nn_infected = 5\npath_loss = 2.5\n"
        "vol_threshold = 0.01\ndetention_time = 100\nmobility.model = rwp\n",
        strict=True,
    )
    assert isinstance(cfg.mobility, RandomWaypoint)


def test_validate_returns_every_violation():
    assert validate(ScenarioConfig()) == []
    one = validate(ScenarioConfig(radius=0.0))
    assert len(one) == 1 and "radius" in one[0]
    two = validate(ScenarioConfig(radius=0.0, mc=McSettings(trials=0)))
    assert len(two) == 2


def test_validate_rwk_step_must_stay_inside_cell():
    bad = ScenarioConfig(radius=10.0, mobility=RandomWalk(step=10.0))
    assert any("rwk step" in v for v in validate(bad))


def test_path_loss_outside_band_warns_but_passes():
    with pytest.warns(UserWarning, match="path_loss"):
        assert validate(ScenarioConfig(path_loss=9.0)) == []
    with pytest.warns(UserWarning):
        parse_config("path_loss = 1.5\n")


_mobilities = st.one_of(
    st.just(Static()),
    st.builds(
        RandomDirection,
        speed=st.floats(0.1, 10),
        step_max=st.floats(1, 200),
        pause=st.floats(0, 2),
    ),
    st.builds(RandomWalk, step=st.floats(0.5, 40), speed=st.floats(0.1, 10)),
    st.builds(
        RandomWaypoint,
        speed_min=st.floats(0.1, 2),
        speed_max=st.floats(2, 10),
        pause_min=st.floats(0, 1),
        pause_max=st.floats(1, 5),
    ),
)

_configs = st.builds(
    ScenarioConfig,
    radius=st.floats(50, 5000),
    n_infected=st.integers(1, 2000),
    vol_min=st.floats(0.1, 0.9),
    vol_max=st.floats(1.0, 3.0),
    path_loss=st.floats(2.0, 7.0),
    vol_threshold=st.floats(1e-5, 1.0),
    detention_time=st.floats(0, 1e4),
    mobility=_mobilities,
    mc=st.builds(
        McSettings,
        trials=st.integers(1, 10**6),
        burn_in_steps=st.integers(0, 10**4),
        time_step=st.floats(0.01, 1.0),
        seed=st.integers(0, 2**64 - 1),
        workers=st.integers(1, 16),
    ),
)


@given(_configs)
@settings(max_examples=200, deadline=None)
def test_serialize_parse_round_trip(cfg):
    assert parse_config(serialize_config(cfg)) == cfg


@given(_configs)
@settings(max_examples=100, deadline=None)
def test_accepted_documents_validate_clean(cfg):
    assert validate(parse_config(serialize_config(cfg))) == []


def test_comments_and_blank_lines_ignored():
    cfg = parse_config("\n# full-line comment\nradius = 42 # trailing comment\n\n")
    assert cfg.radius == 42
