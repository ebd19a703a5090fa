"""Headless session runner: full all-bot games with no network and no clock.

Drives the same SessionMachine as the socket server, applying planned bot
turns in chronological order under a virtual millisecond clock, so the
resulting logs are deterministic given the seed, timestamps included.
"""

from __future__ import annotations

import itertools
import random

from ..core import GameHistory
from .config import Scenario
from .events import SessionEvent
from .machine import (
    PHASE_CLOSED,
    PHASE_DECISION,
    PHASE_REVEAL,
    BotTurn,
    SessionMachine,
)


def virtual_clock(start_ms: int = 0):
    counter = itertools.count(start_ms)
    return lambda: next(counter)


def run_headless_session(
    scenario: Scenario, session_id: str, rng: random.Random
) -> tuple[list[SessionEvent], GameHistory]:
    """Play one complete bot-only session; returns its events and history."""
    if any(token is None for token in scenario.seats):
        raise ValueError("headless sessions need a bot in every seat")

    machine = SessionMachine(scenario, session_id, rng, virtual_clock())
    events: list[SessionEvent] = []

    effects = machine.bootstrap()
    events.extend(effects.events)
    turns = list(effects.bot_turns)

    guard = 0
    while machine.phase != PHASE_CLOSED:
        guard += 1
        if guard > 10 * scenario.game.num_rounds + 10:
            raise RuntimeError(f"headless session stuck in phase {machine.phase}")

        if machine.phase == PHASE_DECISION:
            # Persona actions and submissions across all bots, in time order;
            # persona sorts ahead of the submission at equal offsets.
            schedule: list[tuple[int, int, int, str, BotTurn]] = []
            for turn in turns:
                for action, offset in turn.persona:
                    schedule.append((offset, 0, turn.seat, action, turn))
                schedule.append((turn.submit_offset_ms, 1, turn.seat, "", turn))
            schedule.sort(key=lambda item: item[:3])
            for offset, is_submit, seat, action, turn in schedule:
                if is_submit:
                    effects = machine.submit_bot_turn(turn)
                else:
                    effects = machine.emit_bot_persona(seat, turn.round, action)
                events.extend(effects.events)
            turns = []
            if machine.phase == PHASE_DECISION:
                raise RuntimeError("bot turns did not complete the round")
        elif machine.phase == PHASE_REVEAL:
            effects = machine.advance_round()
            events.extend(effects.events)
            turns = list(effects.bot_turns)
        else:  # questionnaire cannot happen without human seats
            raise RuntimeError(f"unexpected headless phase {machine.phase}")

    return events, machine.history
