"""Log ingestion, summary statistics, and the seeded tournament simulator.

Percentages are reported at one decimal place, computed half-up on exact
rationals (so 84/190 -> 44.2). Counts always sum to the total; the
rendered percentages may drift from 100.0 by rounding slack only.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Optional, Union

from .core import GameConfig, Money
from .session.config import Scenario
from .session.events import (
    EV_CONTRIBUTION_SUBMITTED,
    EV_ERROR,
    EV_GAME_OVER,
    EV_JOINED,
    EV_PERSONA_EVENT,
    EV_QUESTIONNAIRE_SUBMITTED,
    EV_ROUND_REVEALED,
    EV_ROUND_STARTED,
    EV_SESSION_STARTED,
    SchemaVersionMismatch,
    SessionEvent,
)
from .session.headless import run_headless_session
from .session.protocol import (
    PERCEIVED_ROLES,
    QuestionnaireResponse,
    config_from_json,
    parse_questionnaire,
)
from .strategies import make_strategy

KNOWN_EVENT_TYPES = {
    EV_SESSION_STARTED,
    EV_JOINED,
    EV_ROUND_STARTED,
    EV_CONTRIBUTION_SUBMITTED,
    EV_ROUND_REVEALED,
    EV_PERSONA_EVENT,
    EV_QUESTIONNAIRE_SUBMITTED,
    EV_GAME_OVER,
    EV_ERROR,
}


class MalformedLine(ValueError):
    def __init__(self, line_no: int, reason: str) -> None:
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class NoTrials(ValueError):
    """No trial records left after filtering."""


class NoResponses(ValueError):
    """An empty questionnaire batch."""


@dataclass(frozen=True)
class TrialRecord:
    """One player's contribution decision in one round."""

    session_id: str
    player_id: int
    is_bot: bool
    round: int
    amount_cents: int
    timed_out: bool


def tenths_of(value: Fraction) -> int:
    """round(value, 1) in integer tenths, half-up, exactly."""
    scaled = value * 10
    tenths = scaled.numerator // scaled.denominator
    if (scaled - tenths) * 2 >= 1:
        tenths += 1
    return tenths


def percent_tenths(count: int, total: int) -> int:
    """round(100 * count / total, 1) in integer tenths, half-up, exactly."""
    return tenths_of(Fraction(100 * count, total))


def render_tenths(tenths: int) -> str:
    sign = "-" if tenths < 0 else ""
    tenths = abs(tenths)
    return f"{sign}{tenths // 10}.{tenths % 10}"


# ---------------------------------------------------------------------------
# Log loading

LogSource = Union[str, Path, IO[str], Iterable[str]]


def _iter_lines(source: LogSource) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as stream:
            yield from stream.read().splitlines()
        return
    if hasattr(source, "read"):
        yield from source.read().splitlines()
        return
    for line in source:
        yield line.rstrip("\n")


def load_log(source: LogSource) -> tuple[Optional[GameConfig], list[SessionEvent]]:
    """Strictly parse one session log.

    Every line must be a well-formed event of a known type; the first
    session_started event provides the config. An empty log yields
    (None, []).
    """
    events: list[SessionEvent] = []
    config: Optional[GameConfig] = None
    for line_no, line in enumerate(_iter_lines(source), start=1):
        try:
            event = SessionEvent.from_line(line)
        except SchemaVersionMismatch:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedLine(line_no, str(exc)) from exc
        if event.type not in KNOWN_EVENT_TYPES:
            raise MalformedLine(line_no, f"unknown event type {event.type!r}")
        if event.type == EV_SESSION_STARTED and config is None:
            try:
                config = config_from_json(event.data["config"])
            except (KeyError, ValueError, TypeError) as exc:
                raise MalformedLine(line_no, f"bad embedded config: {exc}") from exc
        events.append(event)
    return config, events


def trial_records(events: list[SessionEvent]) -> list[TrialRecord]:
    """Contribution events joined with seat bot/human attribution."""
    is_bot: dict[tuple[str, int], bool] = {}
    for event in events:
        if event.type == EV_SESSION_STARTED:
            for seat in event.data.get("seats", []):
                is_bot[(event.session_id, seat["player"])] = bool(seat["is_bot"])
        elif event.type == EV_JOINED:
            key = (event.session_id, event.data["player"])
            is_bot.setdefault(key, bool(event.data.get("is_bot", False)))
    records = []
    for event in events:
        if event.type != EV_CONTRIBUTION_SUBMITTED:
            continue
        key = (event.session_id, event.data["player"])
        records.append(
            TrialRecord(
                session_id=event.session_id,
                player_id=event.data["player"],
                is_bot=is_bot.get(key, False),
                round=event.data["round"],
                amount_cents=event.data["amount_cents"],
                timed_out=event.data["timed_out"],
            )
        )
    return records


def questionnaire_responses(events: list[SessionEvent]) -> list[QuestionnaireResponse]:
    return [
        parse_questionnaire(event.data["answers"])
        for event in events
        if event.type == EV_QUESTIONNAIRE_SUBMITTED
    ]


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class DistributionReport:
    """Counts and one-decimal percentages per allowed amount."""

    counts: dict[int, int]  # amount_cents -> count
    percent_tenths: dict[int, int]  # amount_cents -> integer tenths of a percent
    total_trials: int
    include_bots: bool

    def percent_text(self, amount_cents: int) -> str:
        return render_tenths(self.percent_tenths[amount_cents])


def contribution_distribution(
    records: list[TrialRecord],
    include_bots: bool = False,
    allowed_cents: Optional[Iterable[int]] = None,
) -> DistributionReport:
    filtered = [r for r in records if include_bots or not r.is_bot]
    if not filtered:
        raise NoTrials("no trials after filtering")
    amounts = {r.amount_cents for r in filtered}
    if allowed_cents is not None:
        amounts |= set(allowed_cents)
    counts = {amount: 0 for amount in sorted(amounts)}
    for record in filtered:
        counts[record.amount_cents] += 1
    total = len(filtered)
    tenths = {amount: percent_tenths(count, total) for amount, count in counts.items()}
    return DistributionReport(
        counts=counts,
        percent_tenths=tenths,
        total_trials=total,
        include_bots=include_bots,
    )


def per_round_series(
    records: list[TrialRecord], include_bots: bool = False
) -> list[tuple[int, Fraction, str]]:
    """Per-round mean contribution (cents) as exact rational plus rendering."""
    filtered = [r for r in records if include_bots or not r.is_bot]
    if not filtered:
        raise NoTrials("no trials after filtering")
    rounds = sorted({r.round for r in filtered})
    series = []
    for round_index in rounds:
        amounts = [r.amount_cents for r in filtered if r.round == round_index]
        mean = Fraction(sum(amounts), len(amounts))
        series.append((round_index, mean, render_tenths(tenths_of(mean))))
    return series


@dataclass(frozen=True)
class QuestionnaireSummary:
    n: int
    generosity_mean: float
    generosity_sd: float
    sd_kind: str  # "sample" (n-1 denominator); "undefined" when n == 1
    role_counts: dict[str, int]
    role_percent_tenths: dict[str, int]

    def role_percent_text(self, role: str) -> str:
        return render_tenths(self.role_percent_tenths[role])


def questionnaire_summary(
    responses: list[QuestionnaireResponse],
) -> QuestionnaireSummary:
    if not responses:
        raise NoResponses("no questionnaire responses")
    scores = [r.generosity for r in responses]
    mean = statistics.fmean(scores)
    if len(scores) >= 2:
        sd = statistics.stdev(scores)  # sample SD, n-1 denominator
        sd_kind = "sample"
    else:
        sd = 0.0
        sd_kind = "undefined"
    role_counts = {role: 0 for role in PERCEIVED_ROLES}
    for response in responses:
        role_counts[response.perceived_role] += 1
    tenths = {
        role: percent_tenths(count, len(responses))
        for role, count in role_counts.items()
    }
    return QuestionnaireSummary(
        n=len(responses),
        generosity_mean=mean,
        generosity_sd=sd,
        sd_kind=sd_kind,
        role_counts=role_counts,
        role_percent_tenths=tenths,
    )


# ---------------------------------------------------------------------------
# Tournament simulation


@dataclass(frozen=True)
class TournamentSpec:
    """A between-subjects strategy condition, run headlessly at desk scale."""

    config: GameConfig
    seat_strategies: tuple[str, ...]
    games: int
    seed: int

    def __post_init__(self) -> None:
        if len(self.seat_strategies) != self.config.num_players:
            raise ValueError(
                f"{len(self.seat_strategies)} strategies for "
                f"{self.config.num_players} seats"
            )
        for token in self.seat_strategies:
            make_strategy(token)
        if self.games < 1:
            raise ValueError("games must be at least 1")


@dataclass
class SimulationResult:
    spec: TournamentSpec
    session_logs: list[list[str]] = field(default_factory=list)
    session_ids: list[str] = field(default_factory=list)
    per_game_finals: list[tuple[Money, ...]] = field(default_factory=list)
    distribution: Optional[DistributionReport] = None
    mean_final_scores: dict[str, Fraction] = field(default_factory=dict)


def _game_rng(seed: int, game_index: int) -> random.Random:
    # Disjoint streams per game; parallel or serial execution is identical.
    return random.Random((seed << 64) + game_index)


def simulate(spec: TournamentSpec) -> SimulationResult:
    """Run the full tournament in process: no network, virtual clock."""
    scenario = Scenario(
        game=spec.config,
        seats=spec.seat_strategies,
        questionnaire=False,
    )
    result = SimulationResult(spec=spec)
    all_records: list[TrialRecord] = []
    totals: dict[str, Fraction] = {token: Fraction(0) for token in spec.seat_strategies}
    seats_per_token: dict[str, int] = {token: 0 for token in spec.seat_strategies}
    for token in spec.seat_strategies:
        seats_per_token[token] += 1

    for game_index in range(spec.games):
        session_id = f"game-{game_index:05d}"
        events, history = run_headless_session(
            scenario, session_id, _game_rng(spec.seed, game_index)
        )
        result.session_ids.append(session_id)
        result.session_logs.append([event.to_line() for event in events])
        finals = history.cumulative_scores
        result.per_game_finals.append(finals)
        for token, score in zip(spec.seat_strategies, finals):
            totals[token] += score
        all_records.extend(trial_records(events))

    # All seats are bots here, so the aggregate includes them by definition.
    result.distribution = contribution_distribution(
        all_records,
        include_bots=True,
        allowed_cents=[int(a * 100) for a in spec.config.allowed_contributions],
    )
    result.mean_final_scores = {
        token: totals[token] / (seats_per_token[token] * spec.games)
        for token in totals
    }
    return result


def write_session_logs(result: SimulationResult, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for session_id, lines in zip(result.session_ids, result.session_logs):
        path = out_dir / f"{session_id}.ndjson"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(path)
    return paths
