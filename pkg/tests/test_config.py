"""Scenario document parsing and wire-exactness gating."""

from __future__ import annotations

from fractions import Fraction

import pytest

from pgglab.core import ConfigError, GameConfig, default_config
from pgglab.session.config import (
    Scenario,
    default_scenario,
    load_scenario,
    parse_exact,
    scenario_from_dict,
)
from pgglab.session.protocol import ensure_wire_exact

PILOT_YAML = """
game:
  num_players: 4
  num_rounds: 10
  endowment_cents: 100
  allowed_cents: [0, 50, 100]
  multiplier: "1.6"
seats: [ac, human, human, human]
display_names: [iCub]
timeout_seconds: 0
bot_delay_ms: [2000, 8000]
persona:
  actions: [think_aloud, clear_throat]
  max_per_turn: 2
questionnaire: true
listen: 127.0.0.1:9100
log_dir: session-logs
"""


class TestParseExact:
    def test_string_fraction(self) -> None:
        assert parse_exact("8/5", what="multiplier") == Fraction(8, 5)

    def test_string_decimal(self) -> None:
        assert parse_exact("1.6", what="multiplier") == Fraction(8, 5)

    def test_bare_yaml_float_means_its_shortest_decimal(self) -> None:
        assert parse_exact(1.6, what="multiplier") == Fraction(8, 5)

    def test_int(self) -> None:
        assert parse_exact(2, what="multiplier") == Fraction(2)

    def test_garbage(self) -> None:
        with pytest.raises(ConfigError, match="multiplier"):
            parse_exact("a lot", what="multiplier")


class TestScenarioDocument:
    def test_pilot_yaml_round_trip(self, tmp_path) -> None:
        path = tmp_path / "pilot.yaml"
        path.write_text(PILOT_YAML)
        scenario = load_scenario(path)
        assert scenario.game == default_config()
        assert scenario.seats == ("ac", None, None, None)
        assert scenario.display_names[0] == "iCub"
        assert scenario.bot_delay_ms == (2000, 8000)
        assert scenario.persona_actions == ("think_aloud", "clear_throat")
        assert scenario.questionnaire is True
        assert scenario.listen == "127.0.0.1:9100"
        assert scenario.log_dir == "session-logs"

    def test_defaults_fill_missing_keys(self) -> None:
        scenario = scenario_from_dict({"seats": ["ac", "human", "human", "human"]})
        assert scenario.game == default_config()
        assert scenario.timeout_seconds == 0
        assert scenario.questionnaire is False

    def test_seat_count_must_match_players(self) -> None:
        with pytest.raises(ConfigError, match="seats"):
            scenario_from_dict({"seats": ["ac", "human"]})

    def test_unknown_strategy_token_rejected(self) -> None:
        with pytest.raises(Exception, match="zzz"):
            scenario_from_dict({"seats": ["zzz", "human", "human", "human"]})

    def test_default_scenario_is_pilot_shape(self) -> None:
        scenario = default_scenario()
        assert scenario.seats == ("ac", None, None, None)
        assert scenario.display_names[0] == "iCub"
        assert scenario.questionnaire is True

    def test_bad_delay_window(self) -> None:
        with pytest.raises(ConfigError, match="bot_delay_ms"):
            default_scenario(bot_delay_ms=(100, 5))


class TestWireExactness:
    def test_default_config_accepted(self) -> None:
        ensure_wire_exact(default_config())

    def test_non_terminating_share_rejected(self) -> None:
        """multiplier 5/3 on 50 cents over 4 players is not a whole milli."""
        config = GameConfig(
            num_players=4,
            num_rounds=10,
            endowment=Fraction(1),
            allowed_contributions=(Fraction(0), Fraction(1, 2), Fraction(1)),
            multiplier=Fraction(5, 3),
        )
        with pytest.raises(ConfigError, match="non-terminating"):
            ensure_wire_exact(config)

    def test_sub_cent_amount_rejected(self) -> None:
        config = GameConfig(
            num_players=4,
            num_rounds=10,
            endowment=Fraction(1),
            allowed_contributions=(Fraction(0), Fraction(1, 3), Fraction(1)),
            multiplier=Fraction(8, 5),
        )
        with pytest.raises(ConfigError, match="whole cents"):
            ensure_wire_exact(config)

    def test_scenario_construction_enforces_exactness(self) -> None:
        config = GameConfig(
            num_players=3,
            num_rounds=5,
            endowment=Fraction(1),
            allowed_contributions=(Fraction(0), Fraction(1)),
            multiplier=Fraction(10, 7),
        )
        with pytest.raises(ConfigError, match="non-terminating"):
            Scenario(game=config, seats=("ac", "ac", "ac"))

    def test_terminating_non_default_config_accepted(self) -> None:
        """multiplier 2 over 5 players: every share is whole milli-euros."""
        config = GameConfig(
            num_players=5,
            num_rounds=3,
            endowment=Fraction(2),
            allowed_contributions=(Fraction(0), Fraction(1), Fraction(2)),
            multiplier=Fraction(2),
        )
        ensure_wire_exact(config)
