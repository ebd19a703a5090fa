"""Session state machine: lobby, simultaneous decision/reveal, questionnaire.

Pure of I/O: every handler mutates the machine and returns the messages,
log events, bot-turn plans, and timer requests for the driver to execute.
The network server and the headless simulator both run this machine, which
is what makes simulated and live sessions byte-compatible in the log.

Phase chain: lobby -> decision(0) -> reveal(0) -> ... -> reveal(K-1)
-> questionnaire -> closed, with questionnaire skipped when disabled or
when no connected human seat remains. During decision(k) a submission is
acknowledged to its sender alone; nothing about other seats' choices
leaves the machine before reveal(k).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..core import (
    GameHistory,
    apply_round,
    from_cents,
    resolve_round,
    to_cents,
    to_milli,
)
from ..strategies import StrategyState, decide, make_strategy, pick_idle_actions
from . import protocol
from .config import Scenario
from .events import (
    EV_CONTRIBUTION_SUBMITTED,
    EV_ERROR,
    EV_GAME_OVER,
    EV_JOINED,
    EV_PERSONA_EVENT,
    EV_QUESTIONNAIRE_SUBMITTED,
    EV_ROUND_REVEALED,
    EV_ROUND_STARTED,
    EV_SESSION_STARTED,
    SessionEvent,
)

PHASE_LOBBY = "lobby"
PHASE_DECISION = "decision"
PHASE_REVEAL = "reveal"
PHASE_QUESTIONNAIRE = "questionnaire"
PHASE_CLOSED = "closed"


@dataclass
class Seat:
    player_id: int
    display_name: str
    is_bot: bool
    strategy: Optional[StrategyState] = None
    connected: bool = False
    fallback_active: bool = False


@dataclass(frozen=True)
class BotTurn:
    """A planned bot move: persona actions, then a submission, at ms offsets."""

    seat: int
    round: int
    amount_cents: int
    submit_offset_ms: int
    persona: tuple[tuple[str, int], ...]


@dataclass
class Effects:
    """Everything a handler asks the driver to do, in order."""

    messages: list[tuple[Optional[int], dict]] = field(default_factory=list)
    events: list[SessionEvent] = field(default_factory=list)
    bot_turns: list[BotTurn] = field(default_factory=list)
    start_decision_timer: Optional[int] = None
    hold_reveal: bool = False
    closed: bool = False

    def merge(self, other: "Effects") -> None:
        self.messages.extend(other.messages)
        self.events.extend(other.events)
        self.bot_turns.extend(other.bot_turns)
        if other.start_decision_timer is not None:
            self.start_decision_timer = other.start_decision_timer
        self.hold_reveal = self.hold_reveal or other.hold_reveal
        self.closed = self.closed or other.closed


class SessionMachine:
    def __init__(
        self,
        scenario: Scenario,
        session_id: str,
        rng: random.Random,
        clock: Callable[[], int],
    ) -> None:
        self.scenario = scenario
        self.config = scenario.game
        self.session_id = session_id
        self.rng = rng
        self._clock = clock
        self._last_ts = 0

        self.phase = PHASE_LOBBY
        self.round = -1
        self.history = GameHistory.empty(self.config)
        self.pending: dict[int, tuple[int, bool]] = {}
        self.questionnaires: dict[int, protocol.QuestionnaireResponse] = {}
        self._allowed_cents = {to_cents(a) for a in self.config.allowed_contributions}

        self.seats: list[Seat] = []
        for index, token in enumerate(scenario.seats):
            name = scenario.display_names[index]
            if token is None:
                self.seats.append(Seat(index, name or f"player{index}", is_bot=False))
            else:
                self.seats.append(
                    Seat(
                        index,
                        name or f"bot{index}",
                        is_bot=True,
                        strategy=make_strategy(token, seed=rng.getrandbits(63)),
                        connected=True,
                    )
                )

    # -- time and event helpers ------------------------------------------

    def _now(self) -> int:
        self._last_ts = max(self._last_ts, self._clock())
        return self._last_ts

    def _event(self, kind: str, **data: Any) -> SessionEvent:
        return SessionEvent(self._now(), self.session_id, kind, data)

    def seats_snapshot(self) -> list[dict[str, Any]]:
        return [
            {
                "player_id": seat.player_id,
                "name": seat.display_name,
                "is_bot": seat.is_bot,
                "connected": seat.connected,
            }
            for seat in self.seats
        ]

    # -- lifecycle ---------------------------------------------------------

    def bootstrap(self) -> Effects:
        """Initial events: session_started, bot joins, and an all-bot autostart."""
        effects = Effects()
        effects.events.append(
            self._event(
                EV_SESSION_STARTED,
                config=protocol.config_to_json(self.config),
                seats=[
                    {
                        "player": seat.player_id,
                        "name": seat.display_name,
                        "is_bot": seat.is_bot,
                        "strategy": seat.strategy.kind.value if seat.strategy else None,
                    }
                    for seat in self.seats
                ],
                questionnaire=self.scenario.questionnaire,
            )
        )
        for seat in self.seats:
            if seat.is_bot:
                effects.events.append(
                    self._event(
                        EV_JOINED,
                        player=seat.player_id,
                        name=seat.display_name,
                        is_bot=True,
                    )
                )
        effects.merge(self._start_if_ready())
        return effects

    def has_free_seat(self) -> bool:
        return self.phase == PHASE_LOBBY and any(
            not seat.is_bot and not seat.connected for seat in self.seats
        )

    def seat_human(self, name: str) -> tuple[Optional[int], Effects]:
        """Bind a client to the lowest free human seat; None when unavailable."""
        effects = Effects()
        if self.phase != PHASE_LOBBY:
            return None, effects
        for seat in self.seats:
            if not seat.is_bot and not seat.connected:
                seat.connected = True
                seat.fallback_active = False
                if name:
                    seat.display_name = name
                effects.events.append(
                    self._event(
                        EV_JOINED,
                        player=seat.player_id,
                        name=seat.display_name,
                        is_bot=False,
                    )
                )
                effects.messages.append(
                    (
                        seat.player_id,
                        protocol.welcome(
                            seat.player_id, self.config, self.seats_snapshot()
                        ),
                    )
                )
                effects.merge(self._start_if_ready())
                return seat.player_id, effects
        return None, effects

    def _start_if_ready(self) -> Effects:
        if self.phase != PHASE_LOBBY:
            return Effects()
        if any(not seat.is_bot and not seat.connected for seat in self.seats):
            return Effects()
        return self._begin_round(0)

    def _begin_round(self, round_index: int) -> Effects:
        self.phase = PHASE_DECISION
        self.round = round_index
        self.pending = {}
        effects = Effects()
        effects.events.append(self._event(EV_ROUND_STARTED, round=round_index))
        effects.messages.append(
            (None, protocol.round_start(round_index, self.config.num_rounds))
        )
        for seat in self.seats:
            if seat.is_bot:
                effects.bot_turns.append(self._plan_bot_turn(seat, round_index))
        if self.scenario.timeout_seconds > 0:
            effects.start_decision_timer = round_index
        # Dropped seats contribute nothing, flagged, as soon as the round opens.
        for seat in self.seats:
            if not seat.is_bot and seat.fallback_active:
                effects.merge(self._record_contribution(seat.player_id, 0, True))
        return effects

    def _plan_bot_turn(self, seat: Seat, round_index: int) -> BotTurn:
        assert seat.strategy is not None
        amount = decide(seat.strategy, self.history, seat.player_id)
        low, high = self.scenario.bot_delay_ms
        submit_offset = self.rng.randint(low, high)
        persona: list[tuple[str, int]] = []
        if self.scenario.persona_actions:
            drawn = pick_idle_actions(
                self.rng,
                self.scenario.persona_actions,
                self.scenario.persona_max_per_turn,
                self.scenario.bot_delay_ms,
            )
            # Idle behavior precedes the pretend keypress: clamp into the
            # submission window and keep chronological order.
            persona = sorted(
                (action, min(delay, submit_offset)) for action, delay in drawn
            )
        return BotTurn(
            seat=seat.player_id,
            round=round_index,
            amount_cents=to_cents(amount),
            submit_offset_ms=submit_offset,
            persona=tuple(persona),
        )

    # -- inbound messages ---------------------------------------------------

    def handle_message(self, seat_id: int, message: dict[str, Any]) -> Effects:
        """Route one parsed client message from a seated player."""
        kind = message["type"]
        if kind == protocol.MSG_CONTRIBUTE:
            return self.handle_contribute(
                seat_id, message["round"], message["amount_cents"]
            )
        if kind == protocol.MSG_QUESTIONNAIRE:
            return self.handle_questionnaire(seat_id, message["answers"])
        return self._error_to(
            seat_id, protocol.ERR_MALFORMED, f"unexpected message type {kind!r}"
        )

    def handle_contribute(self, seat_id: int, round_index: int, amount_cents: int) -> Effects:
        if self.phase != PHASE_DECISION or round_index != self.round:
            return self._error_to(
                seat_id,
                protocol.ERR_OUT_OF_PHASE,
                f"no contribution expected for round {round_index} now",
            )
        if seat_id in self.pending:
            return self._error_to(
                seat_id,
                protocol.ERR_DUPLICATE_CONTRIBUTION,
                f"round {round_index} contribution already recorded; first stands",
            )
        if amount_cents not in self._allowed_cents:
            allowed = sorted(self._allowed_cents)
            return self._error_to(
                seat_id,
                protocol.ERR_ILLEGAL_AMOUNT,
                f"{amount_cents} cents is not one of {allowed}",
            )
        effects = Effects()
        effects.messages.append((seat_id, protocol.contribution_ack(round_index)))
        effects.merge(self._record_contribution(seat_id, amount_cents, False))
        return effects

    def _record_contribution(
        self, seat_id: int, amount_cents: int, timed_out: bool
    ) -> Effects:
        effects = Effects()
        if seat_id in self.pending:
            return effects
        self.pending[seat_id] = (amount_cents, timed_out)
        effects.events.append(
            self._event(
                EV_CONTRIBUTION_SUBMITTED,
                player=seat_id,
                round=self.round,
                amount_cents=amount_cents,
                timed_out=timed_out,
            )
        )
        if len(self.pending) == self.config.num_players:
            effects.merge(self._reveal())
        return effects

    def _reveal(self) -> Effects:
        amounts = [
            from_cents(self.pending[player][0])
            for player in range(self.config.num_players)
        ]
        result = resolve_round(amounts, self.config, self.round)
        self.history = apply_round(self.history, result)
        self.phase = PHASE_REVEAL

        effects = Effects()
        payload = protocol.round_result_payload(result, self.history.cumulative_scores)
        effects.events.append(self._event(EV_ROUND_REVEALED, **payload))
        effects.messages.append(
            (None, protocol.round_result(result, self.history.cumulative_scores))
        )
        if self.history.is_complete:
            final_milli = [to_milli(s) for s in self.history.cumulative_scores]
            effects.events.append(
                self._event(EV_GAME_OVER, final_scores_milli=final_milli)
            )
            effects.messages.append((None, protocol.game_over(final_milli)))
            # Nothing left to pace: questionnaires are acceptable as soon as
            # clients see game_over, so leave the final reveal immediately.
            if self.scenario.questionnaire and self._questionnaire_waitlist():
                self.phase = PHASE_QUESTIONNAIRE
            else:
                effects.merge(self._close())
        else:
            effects.hold_reveal = True
        return effects

    def advance_round(self) -> Effects:
        """Leave a mid-game reveal screen and open the next decision round."""
        if self.phase != PHASE_REVEAL:
            return Effects()
        return self._begin_round(self.round + 1)

    def _questionnaire_waitlist(self) -> list[int]:
        return [
            seat.player_id
            for seat in self.seats
            if not seat.is_bot
            and seat.connected
            and not seat.fallback_active
            and seat.player_id not in self.questionnaires
        ]

    def handle_questionnaire(self, seat_id: int, answers: Any) -> Effects:
        if self.phase != PHASE_QUESTIONNAIRE or self.seats[seat_id].is_bot:
            return self._error_to(
                seat_id, protocol.ERR_OUT_OF_PHASE, "no questionnaire expected now"
            )
        if seat_id in self.questionnaires:
            return self._error_to(
                seat_id,
                protocol.ERR_DUPLICATE_QUESTIONNAIRE,
                "questionnaire already recorded; first stands",
            )
        try:
            response = protocol.parse_questionnaire(answers)
        except protocol.WireError as exc:
            return self._error_to(seat_id, exc.code, str(exc))
        self.questionnaires[seat_id] = response
        effects = Effects()
        effects.events.append(
            self._event(
                EV_QUESTIONNAIRE_SUBMITTED, player=seat_id, answers=response.to_json()
            )
        )
        if not self._questionnaire_waitlist():
            effects.merge(self._close())
        return effects

    # -- timers, bots, disconnects -------------------------------------------

    def on_decision_timeout(self, round_index: int) -> Effects:
        """Record 0 cents, flagged, for every missing seat; then reveal."""
        effects = Effects()
        if self.phase != PHASE_DECISION or self.round != round_index:
            return effects
        for seat in self.seats:
            if seat.player_id not in self.pending:
                effects.merge(self._record_contribution(seat.player_id, 0, True))
        return effects

    def emit_bot_persona(self, seat_id: int, round_index: int, action_id: str) -> Effects:
        effects = Effects()
        if self.phase != PHASE_DECISION or self.round != round_index:
            return effects
        effects.events.append(
            self._event(EV_PERSONA_EVENT, player=seat_id, action_id=action_id)
        )
        effects.messages.append((None, protocol.persona_event(seat_id, action_id)))
        return effects

    def submit_bot_turn(self, turn: BotTurn) -> Effects:
        """Apply a planned bot submission; silently obsolete after a timeout."""
        if self.phase != PHASE_DECISION or self.round != turn.round:
            return Effects()
        if turn.seat in self.pending:
            return Effects()
        return self.handle_contribute(turn.seat, turn.round, turn.amount_cents)

    def handle_disconnect(self, seat_id: int) -> Effects:
        effects = Effects()
        seat = self.seats[seat_id]
        if seat.is_bot or not seat.connected:
            return effects
        seat.connected = False
        if self.phase == PHASE_LOBBY:
            # Free the seat entirely so a rejoin can take it.
            seat.fallback_active = False
            return effects
        seat.fallback_active = True
        if self.phase == PHASE_DECISION and seat_id not in self.pending:
            effects.merge(self._record_contribution(seat_id, 0, True))
        if self.phase == PHASE_QUESTIONNAIRE and not self._questionnaire_waitlist():
            effects.merge(self._close())
        return effects

    def abort(self, code: str, message: str) -> Effects:
        """Session-fatal failure: tell everyone, log, close."""
        effects = Effects()
        effects.messages.append((None, protocol.error(code, message)))
        effects.events.append(self._event(EV_ERROR, code=code, message=message))
        effects.merge(self._close())
        return effects

    def _close(self) -> Effects:
        self.phase = PHASE_CLOSED
        effects = Effects()
        effects.closed = True
        return effects

    def _error_to(self, seat_id: int, code: str, message: str) -> Effects:
        effects = Effects()
        effects.messages.append((seat_id, protocol.error(code, message)))
        return effects
