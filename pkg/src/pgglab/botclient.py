"""Headless network client seating one bot strategy over the wire.

Used by the protocol tests and the `bot` CLI subcommand. The client
rebuilds the exact game history from each reveal payload and cross-checks
the server's milli-euro integers against its own rational recomputation,
so any engine/wire divergence surfaces as a ProtocolViolation.
"""

from __future__ import annotations

import asyncio
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from websockets.asyncio.client import connect
from websockets.exceptions import ConnectionClosed, ConnectionClosedOK

from .core import GameHistory, apply_round, resolve_round, to_cents, to_milli
from .session import protocol
from .strategies import decide, make_strategy


class ProtocolViolation(Exception):
    """The server sent something inconsistent with the game rules."""


@dataclass
class ClientTrace:
    """Everything one client saw and did, for post-hoc assertions."""

    strategy_token: str
    player_id: Optional[int] = None
    inbound: list[dict] = field(default_factory=list)
    sent: list[dict] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)
    final_scores_milli: Optional[list[int]] = None

    @property
    def history(self) -> list[tuple[str, dict]]:
        return [(m["type"], m) for m in self.inbound]


async def run_bot_client(
    uri: str,
    session_id: str,
    strategy_token: str,
    *,
    seed: int = 0,
    name: Optional[str] = None,
    delay_ms: tuple[int, int] = (0, 0),
) -> ClientTrace:
    """Join, play every round with the given strategy, return the trace."""
    state = make_strategy(strategy_token, seed)
    rng = random.Random(seed)
    trace = ClientTrace(strategy_token=strategy_token)
    config = None
    history = None

    async with connect(uri) as conn:

        async def send(payload: dict) -> None:
            trace.sent.append(payload)
            await conn.send(protocol.encode(payload))

        await send(
            {
                "type": "join",
                "session": session_id,
                "name": name or f"bot-{strategy_token}",
            }
        )
        try:
            async for raw in conn:
                message = json.loads(raw)
                trace.inbound.append(message)
                kind = message["type"]
                if kind == protocol.MSG_WELCOME:
                    trace.player_id = message["player_id"]
                    config = protocol.config_from_json(message["config"])
                    history = GameHistory.empty(config)
                elif kind == protocol.MSG_ROUND_START:
                    if history is None or trace.player_id is None:
                        raise ProtocolViolation("round_start before welcome")
                    amount = decide(state, history, trace.player_id)
                    low, high = delay_ms
                    pause = rng.randint(low, high)
                    if pause:
                        await asyncio.sleep(pause / 1000)
                    await send(
                        {
                            "type": "contribute",
                            "round": message["round"],
                            "amount_cents": to_cents(amount),
                        }
                    )
                elif kind == protocol.MSG_ROUND_RESULT:
                    if history is None:
                        raise ProtocolViolation("round_result before welcome")
                    result = resolve_round(
                        [Fraction(c, 100) for c in message["contributions_cents"]],
                        config,
                        message["round"],
                    )
                    history = apply_round(history, result)
                    recomputed = [to_milli(p) for p in result.payoffs]
                    if recomputed != message["payoffs_milli"]:
                        raise ProtocolViolation(
                            f"round {message['round']}: server payoffs "
                            f"{message['payoffs_milli']} != recomputed {recomputed}"
                        )
                    cumulative = [to_milli(s) for s in history.cumulative_scores]
                    if cumulative != message["cumulative_milli"]:
                        raise ProtocolViolation(
                            f"round {message['round']}: cumulative mismatch"
                        )
                elif kind == protocol.MSG_GAME_OVER:
                    trace.final_scores_milli = message["final_scores_milli"]
                    break
                elif kind == protocol.MSG_ERROR:
                    trace.errors.append(message)
        except (ConnectionClosedOK, ConnectionClosed):
            pass
    return trace
