"""Server scenario configuration: a YAML document describing one session setup.

Example:

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
    reveal_hold_ms: 3000
    persona:
      actions: [think_aloud, focused_face, clear_throat, look_at_player, look_at_screen]
      max_per_turn: 2
    questionnaire: true
    listen: 127.0.0.1:8765
    log_dir: logs

Multipliers and amounts must be exact: quote "1.6" or write "8/5". A bare
YAML float is accepted via its shortest decimal representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import yaml

from ..core import ConfigError, GameConfig, validate_config
from ..strategies import make_strategy
from .protocol import ensure_wire_exact

DEFAULT_PERSONA_ACTIONS = (
    "think_aloud",
    "focused_face",
    "clear_throat",
    "look_at_player",
    "look_at_screen",
)


def parse_exact(value: Any, *, what: str) -> Fraction:
    """Parse an exact rational from int, "8/5", "1.6", or (via repr) a float."""
    if isinstance(value, bool):
        raise ConfigError(f"{what} must be a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse {what} {value!r}: {exc}") from exc
    raise ConfigError(f"{what} must be a number or string, got {type(value).__name__}")


@dataclass(frozen=True)
class Scenario:
    """One validated session setup: game parameters plus choreography knobs."""

    game: GameConfig
    seats: tuple[Optional[str], ...]  # strategy token per bot seat, None = human
    display_names: tuple[str, ...] = ()
    timeout_seconds: float = 0.0
    bot_delay_ms: tuple[int, int] = (2000, 8000)
    reveal_hold_ms: int = 3000
    persona_actions: tuple[str, ...] = DEFAULT_PERSONA_ACTIONS
    persona_max_per_turn: int = 2
    questionnaire: bool = False
    listen: str = "127.0.0.1:8765"
    log_dir: str = "logs"

    def __post_init__(self) -> None:
        if len(self.seats) != self.game.num_players:
            raise ConfigError(
                f"{len(self.seats)} seats declared for "
                f"{self.game.num_players} players"
            )
        for token in self.seats:
            if token is not None:
                make_strategy(token)  # raises UnknownStrategyToken
        names = tuple(self.display_names) + ("",) * (
            self.game.num_players - len(self.display_names)
        )
        object.__setattr__(self, "display_names", names[: self.game.num_players])
        low, high = self.bot_delay_ms
        if low < 0 or high < low:
            raise ConfigError(f"bot_delay_ms window {self.bot_delay_ms} is invalid")
        if self.persona_max_per_turn < 0:
            raise ConfigError("persona max_per_turn must be non-negative")
        if self.timeout_seconds < 0:
            raise ConfigError("timeout_seconds must be non-negative")
        if self.reveal_hold_ms < 0:
            raise ConfigError("reveal_hold_ms must be non-negative")
        ensure_wire_exact(self.game)


def default_scenario(**overrides: Any) -> Scenario:
    """The pilot setup: one always-cooperate bot named iCub, three humans."""
    from ..core import default_config

    values: dict[str, Any] = {
        "game": default_config(),
        "seats": ("ac", None, None, None),
        "display_names": ("iCub",),
        "questionnaire": True,
    }
    values.update(overrides)
    return Scenario(**values)


def game_config_from_dict(data: dict[str, Any]) -> GameConfig:
    allowed_cents = data.get("allowed_cents", [0, 50, 100])
    if not isinstance(allowed_cents, list):
        raise ConfigError("allowed_cents must be a list of integers")
    return validate_config(
        num_players=data.get("num_players", 4),
        num_rounds=data.get("num_rounds", 10),
        endowment=Fraction(data.get("endowment_cents", 100), 100),
        allowed_contributions=[Fraction(c, 100) for c in allowed_cents],
        multiplier=parse_exact(data.get("multiplier", "8/5"), what="multiplier"),
    )


def scenario_from_dict(data: dict[str, Any]) -> Scenario:
    if not isinstance(data, dict):
        raise ConfigError("scenario document must be a mapping")
    game = game_config_from_dict(data.get("game", {}))

    raw_seats = data.get("seats")
    if raw_seats is None:
        seats: tuple[Optional[str], ...] = (None,) * game.num_players
    else:
        if not isinstance(raw_seats, list):
            raise ConfigError("seats must be a list of strategy tokens or 'human'")
        seats = tuple(
            None if str(entry).lower() == "human" else str(entry).lower()
            for entry in raw_seats
        )

    persona = data.get("persona", {}) or {}
    actions = persona.get("actions", list(DEFAULT_PERSONA_ACTIONS))
    if not isinstance(actions, list) or not all(isinstance(a, str) for a in actions):
        raise ConfigError("persona actions must be a list of tokens")

    delay = data.get("bot_delay_ms", [2000, 8000])
    if not (isinstance(delay, list) and len(delay) == 2):
        raise ConfigError("bot_delay_ms must be [low, high]")

    return Scenario(
        game=game,
        seats=seats,
        display_names=tuple(str(n) for n in data.get("display_names", [])),
        timeout_seconds=float(data.get("timeout_seconds", 0)),
        bot_delay_ms=(int(delay[0]), int(delay[1])),
        reveal_hold_ms=int(data.get("reveal_hold_ms", 3000)),
        persona_actions=tuple(actions),
        persona_max_per_turn=int(persona.get("max_per_turn", 2)),
        questionnaire=bool(data.get("questionnaire", False)),
        listen=str(data.get("listen", "127.0.0.1:8765")),
        log_dir=str(data.get("log_dir", "logs")),
    )


def load_scenario(path: Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"scenario {path} is not valid YAML: {exc}") from exc
    return scenario_from_dict(data or {})
