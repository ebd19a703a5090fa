"""Exact rules engine for the public good game.

Every monetary quantity is a `fractions.Fraction`; nothing in this module
ever rounds. That is what makes the conservation identity, the dominance
checks, and the replay guarantees exact rather than approximate. Decimal
rendering happens only at the boundary, via :func:`format_eur`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Money = Fraction
PlayerId = int

MoneyLike = Union[Money, int, str]


class GameError(Exception):
    """Base class for rule violations raised by the engine."""


class ConfigError(GameError, ValueError):
    """A candidate configuration violates a constraint (named in the message)."""


class MissingContribution(GameError):
    """A round was resolved without a contribution from every player."""


class IllegalAmount(GameError):
    """A contribution is not one of the configured allowed amounts."""


class RoundIndexMismatch(GameError):
    """A result was applied out of order."""


class GameAlreadyComplete(GameError):
    """All configured rounds have already been played."""


class GameNotComplete(GameError):
    """Final scores requested before the last round."""


# ---------------------------------------------------------------------------
# Money helpers


def eur(value: MoneyLike) -> Money:
    """Parse an exact euro amount from an int, Fraction, or string ("0.50", "8/5")."""
    return Fraction(value)


def from_cents(cents: int) -> Money:
    return Fraction(cents, 100)


def to_cents(amount: Money) -> int:
    """Exact integer cents. Raises ValueError if the amount is not a whole cent."""
    scaled = amount * 100
    if scaled.denominator != 1:
        raise ValueError(f"{amount} is not a whole number of cents")
    return scaled.numerator


def to_milli(amount: Money) -> int:
    """Exact integer milli-euros (the unit of computed quantities on the wire)."""
    scaled = amount * 1000
    if scaled.denominator != 1:
        raise ValueError(f"{amount} is not a whole number of milli-euros")
    return scaled.numerator


def is_exact_at(amount: Money, places: int = 2) -> bool:
    """True when the amount terminates within `places` decimal digits."""
    return (amount * 10**places).denominator == 1


def format_eur(amount: Money, places: int = 2) -> str:
    """Render as a decimal string with `places` fraction digits.

    Non-terminating amounts are rounded half-up; callers that must
    distinguish use :func:`is_exact_at` alongside.
    """
    scale = 10**places
    scaled = amount * scale
    units = scaled.numerator // scaled.denominator
    if (scaled - units) * 2 >= 1:
        units += 1
    sign = "-" if units < 0 else ""
    units = abs(units)
    return f"{sign}{units // scale}.{units % scale:0{places}d}"


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class GameConfig:
    """Validated, immutable parameters of one game.

    `allowed_contributions` is normalized to a sorted tuple of distinct
    amounts; construction fails if any invariant is violated.
    """

    num_players: int
    num_rounds: int
    endowment: Money
    allowed_contributions: tuple[Money, ...]
    multiplier: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "endowment", Fraction(self.endowment))
        object.__setattr__(self, "multiplier", Fraction(self.multiplier))
        allowed = tuple(sorted({Fraction(a) for a in self.allowed_contributions}))
        object.__setattr__(self, "allowed_contributions", allowed)

        if self.num_players < 3:
            raise ConfigError(f"too few players: need at least 3, got {self.num_players}")
        if self.num_rounds < 1:
            raise ConfigError(f"num_rounds must be at least 1, got {self.num_rounds}")
        if self.endowment <= 0:
            raise ConfigError(f"endowment must be positive, got {self.endowment}")
        if self.multiplier <= 1:
            raise ConfigError(
                f"multiplier must be greater than 1, got {self.multiplier}"
            )
        for amount in allowed:
            if amount < 0 or amount > self.endowment:
                raise ConfigError(
                    f"allowed contribution {amount} out of range [0, {self.endowment}]"
                )
        if Fraction(0) not in allowed or self.endowment not in allowed:
            raise ConfigError(
                "allowed contributions must include 0 and the full endowment"
            )

    @property
    def marginal_return(self) -> Fraction:
        """Per-player return on one contributed unit (multiplier / num_players)."""
        return self.multiplier / self.num_players


def validate_config(
    *,
    num_players: int,
    num_rounds: int,
    endowment: MoneyLike,
    allowed_contributions: Iterable[MoneyLike],
    multiplier: MoneyLike,
) -> GameConfig:
    """Coerce raw values (ints, strings) and return a validated GameConfig."""
    try:
        endow = Fraction(endowment)
        mult = Fraction(multiplier)
        allowed = tuple(Fraction(a) for a in allowed_contributions)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"unparseable amount in configuration: {exc}") from exc
    return GameConfig(
        num_players=int(num_players),
        num_rounds=int(num_rounds),
        endowment=endow,
        allowed_contributions=allowed,
        multiplier=mult,
    )


def default_config() -> GameConfig:
    """Four players, ten rounds, 1 euro endowment, {0, 0.50, 1}, multiplier 8/5."""
    return GameConfig(
        num_players=4,
        num_rounds=10,
        endowment=Fraction(1),
        allowed_contributions=(Fraction(0), Fraction(1, 2), Fraction(1)),
        multiplier=Fraction(8, 5),
    )


# ---------------------------------------------------------------------------
# Round resolution


@dataclass(frozen=True)
class RoundResult:
    """Outcome of one resolved round; contributions and payoffs indexed by player."""

    round_index: int
    contributions: tuple[Money, ...]
    pool: Money
    multiplied_pool: Money
    share: Money
    payoffs: tuple[Money, ...]


def _normalize_contributions(
    contributions: Union[Mapping[PlayerId, MoneyLike], Sequence[MoneyLike]],
    num_players: int,
) -> tuple[Money, ...]:
    if isinstance(contributions, Mapping):
        for player in contributions:
            if not 0 <= int(player) < num_players:
                raise ValueError(f"unknown player id {player}")
        missing = [p for p in range(num_players) if p not in contributions]
        if missing:
            raise MissingContribution(f"no contribution from player {missing[0]}")
        return tuple(Fraction(contributions[p]) for p in range(num_players))
    amounts = tuple(Fraction(a) for a in contributions)
    if len(amounts) < num_players:
        raise MissingContribution(
            f"no contribution from player {len(amounts)}"
        )
    if len(amounts) > num_players:
        raise ValueError(
            f"expected {num_players} contributions, got {len(amounts)}"
        )
    return amounts


def resolve_round(
    contributions: Union[Mapping[PlayerId, MoneyLike], Sequence[MoneyLike]],
    config: GameConfig,
    round_index: int,
) -> RoundResult:
    """Resolve one simultaneous round. Pure function of its inputs.

    pool = sum of contributions, multiplied by the configured factor,
    split equally; each payoff is the kept endowment plus the equal share.
    """
    amounts = _normalize_contributions(contributions, config.num_players)
    for player, amount in enumerate(amounts):
        if amount not in config.allowed_contributions:
            raise IllegalAmount(
                f"player {player}: {format_eur(amount)} is not an allowed contribution"
            )
    pool = sum(amounts, start=Fraction(0))
    multiplied_pool = config.multiplier * pool
    share = multiplied_pool / config.num_players
    payoffs = tuple((config.endowment - a) + share for a in amounts)
    return RoundResult(
        round_index=round_index,
        contributions=amounts,
        pool=pool,
        multiplied_pool=multiplied_pool,
        share=share,
        payoffs=payoffs,
    )


# ---------------------------------------------------------------------------
# Game history


@dataclass(frozen=True)
class GameHistory:
    """Ordered round results plus cumulative scores; the sole input to strategies."""

    config: GameConfig
    rounds: tuple[RoundResult, ...]
    cumulative_scores: tuple[Money, ...]

    @classmethod
    def empty(cls, config: GameConfig) -> "GameHistory":
        return cls(
            config=config,
            rounds=(),
            cumulative_scores=(Fraction(0),) * config.num_players,
        )

    @property
    def is_complete(self) -> bool:
        return len(self.rounds) == self.config.num_rounds


def apply_round(history: GameHistory, result: RoundResult) -> GameHistory:
    """Append a resolved round, updating cumulative scores exactly."""
    if len(history.rounds) >= history.config.num_rounds:
        raise GameAlreadyComplete(
            f"all {history.config.num_rounds} rounds already played"
        )
    if result.round_index != len(history.rounds):
        raise RoundIndexMismatch(
            f"expected round {len(history.rounds)}, got {result.round_index}"
        )
    cumulative = tuple(
        total + payoff
        for total, payoff in zip(history.cumulative_scores, result.payoffs)
    )
    return GameHistory(
        config=history.config,
        rounds=history.rounds + (result,),
        cumulative_scores=cumulative,
    )


def final_scores(history: GameHistory) -> tuple[Money, ...]:
    """Cumulative scores of a completed game."""
    if not history.is_complete:
        raise GameNotComplete(
            f"{len(history.rounds)} of {history.config.num_rounds} rounds played"
        )
    return history.cumulative_scores


# ---------------------------------------------------------------------------
# Equilibrium utilities


def best_response(others: Sequence[MoneyLike], config: GameConfig) -> Money:
    """The allowed contribution maximizing one player's single-round payoff.

    Ties break toward the smaller amount. With marginal return below 1
    the answer is always 0 (free riding dominates); above 1 it is the
    full endowment.
    """
    amounts = tuple(Fraction(a) for a in others)
    if len(amounts) != config.num_players - 1:
        raise ValueError(
            f"expected {config.num_players - 1} co-player amounts, got {len(amounts)}"
        )
    for amount in amounts:
        if amount not in config.allowed_contributions:
            raise IllegalAmount(f"{format_eur(amount)} is not an allowed contribution")
    others_sum = sum(amounts, start=Fraction(0))
    best = None
    best_payoff = None
    for candidate in config.allowed_contributions:  # ascending: first max wins ties
        payoff = (config.endowment - candidate) + config.marginal_return * (
            others_sum + candidate
        )
        if best_payoff is None or payoff > best_payoff:
            best, best_payoff = candidate, payoff
    assert best is not None  # allowed_contributions is never empty
    return best


def all_profiles(config: GameConfig) -> Iterable[tuple[Money, ...]]:
    """Every legal contribution profile (cartesian power of the allowed set)."""
    return itertools.product(config.allowed_contributions, repeat=config.num_players)
