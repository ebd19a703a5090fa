"""Bot decision policies and the randomized idle-behavior generator.

Three policies ship: always cooperate (the robot condition of the pilot),
always free ride, and tit-for-tat. With three co-players "copy the last
move" is ambiguous, so tit-for-tat here responds to the mean of the other
players' previous contributions, snapped to the nearest allowed amount
with exact midpoints snapped upward, toward cooperation. All three are
deterministic functions of the game history.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .core import GameHistory, Money, PlayerId


class UnknownStrategyToken(ValueError):
    """A strategy token outside the closed set "ac" | "afr" | "tft"."""


class EmptyAllowedSet(RuntimeError):
    """Config corruption: no allowed contribution to choose from."""


class EmptyActionSet(ValueError):
    """The persona generator needs at least one action to draw from."""


class StrategyKind(str, Enum):
    ALWAYS_COOPERATE = "ac"
    ALWAYS_FREE_RIDE = "afr"
    TIT_FOR_TAT = "tft"


# How tit-for-tat aggregates the co-players' previous contributions.
# "mean" is the shipped default; the alternatives exist so other readings
# of "copies the last move" can be tested.
TFT_AGGREGATORS = ("mean", "min", "max")


@dataclass
class StrategyState:
    """A bot's policy plus its seeded RNG (reserved for stochastic policies)."""

    kind: StrategyKind
    rng_seed: int = 0
    tft_aggregate: str = "mean"

    def __post_init__(self) -> None:
        if self.tft_aggregate not in TFT_AGGREGATORS:
            raise ValueError(f"unknown tit-for-tat aggregator {self.tft_aggregate!r}")


def make_strategy(kind_token: str, seed: int = 0) -> StrategyState:
    """Parse "ac" / "afr" / "tft" (case-insensitive) into an initialized state."""
    token = kind_token.strip().lower()
    try:
        kind = StrategyKind(token)
    except ValueError:
        raise UnknownStrategyToken(
            f"unknown strategy token {kind_token!r} (expected ac, afr, or tft)"
        ) from None
    return StrategyState(kind=kind, rng_seed=seed)


def snap_to_allowed(value: Fraction, allowed: Sequence[Money]) -> Money:
    """Nearest allowed amount; exact midpoints snap to the larger amount."""
    if not allowed:
        raise EmptyAllowedSet("no allowed contributions to snap to")
    best = None
    best_distance = None
    for amount in allowed:
        distance = abs(amount - value)
        if (
            best_distance is None
            or distance < best_distance
            or (distance == best_distance and amount > best)
        ):
            best, best_distance = amount, distance
    return best


def decide(state: StrategyState, history: GameHistory, self_id: PlayerId) -> Money:
    """The bot's contribution for the upcoming round. Always a legal amount."""
    config = history.config
    if not 0 <= self_id < config.num_players:
        raise ValueError(f"player id {self_id} out of range")
    allowed = config.allowed_contributions
    if not allowed:
        raise EmptyAllowedSet("configuration has no allowed contributions")

    if state.kind is StrategyKind.ALWAYS_COOPERATE:
        return config.endowment
    if state.kind is StrategyKind.ALWAYS_FREE_RIDE:
        return Fraction(0)

    # Tit-for-tat: open with full cooperation, then mirror the others.
    if not history.rounds:
        return config.endowment
    previous = history.rounds[-1]
    others = [
        amount
        for player, amount in enumerate(previous.contributions)
        if player != self_id
    ]
    if state.tft_aggregate == "min":
        target = min(others)
    elif state.tft_aggregate == "max":
        target = max(others)
    else:
        target = sum(others, start=Fraction(0)) / len(others)
    return snap_to_allowed(target, allowed)


def pick_idle_actions(
    rng: random.Random,
    action_set: Sequence[str],
    max_actions: int,
    delay_window_ms: tuple[int, int] = (2000, 8000),
) -> list[tuple[str, int]]:
    """Draw 0..max_actions idle actions with per-action delays.

    Actions are uniform draws with replacement; delays are uniform integer
    milliseconds over the window. Deterministic given the RNG state.
    """
    if not action_set:
        raise EmptyActionSet("persona action set is empty")
    if max_actions < 0:
        raise ValueError(f"max_actions must be non-negative, got {max_actions}")
    low, high = delay_window_ms
    count = rng.randint(0, max_actions)
    return [
        (rng.choice(list(action_set)), rng.randint(low, high)) for _ in range(count)
    ]
