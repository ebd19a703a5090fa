"""Public good game experiment platform.

An exact rules engine with bot strategies, a networked simultaneous-move
session server for mixed human/bot groups, and an analysis/simulation CLI.
"""

from .core import (
    ConfigError,
    GameAlreadyComplete,
    GameConfig,
    GameError,
    GameHistory,
    GameNotComplete,
    IllegalAmount,
    MissingContribution,
    Money,
    PlayerId,
    RoundIndexMismatch,
    RoundResult,
    apply_round,
    best_response,
    default_config,
    eur,
    final_scores,
    format_eur,
    from_cents,
    resolve_round,
    to_cents,
    to_milli,
    validate_config,
)
from .strategies import (
    StrategyKind,
    StrategyState,
    UnknownStrategyToken,
    decide,
    make_strategy,
    pick_idle_actions,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "GameAlreadyComplete",
    "GameConfig",
    "GameError",
    "GameHistory",
    "GameNotComplete",
    "IllegalAmount",
    "MissingContribution",
    "Money",
    "PlayerId",
    "RoundIndexMismatch",
    "RoundResult",
    "StrategyKind",
    "StrategyState",
    "UnknownStrategyToken",
    "apply_round",
    "best_response",
    "decide",
    "default_config",
    "eur",
    "final_scores",
    "format_eur",
    "from_cents",
    "make_strategy",
    "pick_idle_actions",
    "resolve_round",
    "to_cents",
    "to_milli",
    "validate_config",
    "__version__",
]
