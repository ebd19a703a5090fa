"""The live experiment server: WebSocket transport around the session machine.

Each session is one logical actor: every inbound message, timeout, and
bot-turn firing is serialized through the session lock, so game state is
never touched concurrently. Events are flushed to the log before any
resulting message is sent; a failing log aborts the session rather than
losing experiment data. Distinct sessions run independently.

Optionally serves the static browser client on the same listener for
plain HTTP requests (--serve-ui).
"""

from __future__ import annotations

import asyncio
import logging
import mimetypes
import random
import time
from http import HTTPStatus
from pathlib import Path
from typing import Optional

from websockets.asyncio.server import ServerConnection, serve
from websockets.datastructures import Headers
from websockets.exceptions import ConnectionClosed
from websockets.http11 import Request, Response

from . import protocol
from .config import Scenario
from .events import LogSink, SinkUnavailable
from .machine import BotTurn, Effects, SessionMachine

log = logging.getLogger(__name__)


def _wall_clock_ms() -> int:
    return int(time.time() * 1000)


class LiveSession:
    """One running session: machine, log sink, connections, timers."""

    def __init__(self, machine: SessionMachine, sink: LogSink) -> None:
        self.machine = machine
        self.sink = sink
        self.lock = asyncio.Lock()
        self.connections: dict[int, ServerConnection] = {}
        self.tasks: set[asyncio.Task] = set()
        self.closed = False

    def spawn(self, coro) -> None:
        task = asyncio.create_task(coro)
        self.tasks.add(task)
        task.add_done_callback(self.tasks.discard)

    async def apply(self, effects: Effects) -> None:
        """Execute one handler's effects. Caller holds the session lock."""
        if self.closed and not effects.events and not effects.messages:
            return
        for event in effects.events:
            try:
                self.sink.append(event)
            except SinkUnavailable as exc:
                log.error("session %s: %s", self.machine.session_id, exc)
                if not self.closed:
                    abort = self.machine.abort(
                        protocol.ERR_SINK_UNAVAILABLE, "event log write failed"
                    )
                    await self._send_batch(abort.messages)
                    await self._finish()
                return
        await self._send_batch(effects.messages)
        for turn in effects.bot_turns:
            self.spawn(self._run_bot_turn(turn))
        if effects.start_decision_timer is not None:
            self.spawn(self._run_decision_timer(effects.start_decision_timer))
        if effects.hold_reveal:
            self.spawn(self._advance_after_hold())
        if effects.closed:
            await self._finish()

    async def _send_batch(self, messages: list[tuple[Optional[int], dict]]) -> None:
        for target, payload in messages:
            text = protocol.encode(payload)
            if target is None:
                receivers = list(self.connections.values())
            else:
                conn = self.connections.get(target)
                receivers = [conn] if conn is not None else []
            for conn in receivers:
                try:
                    await conn.send(text)
                except ConnectionClosed:
                    pass  # the reader loop handles the disconnect

    async def _run_bot_turn(self, turn: BotTurn) -> None:
        elapsed = 0
        for action, offset in turn.persona:
            await asyncio.sleep((offset - elapsed) / 1000)
            elapsed = offset
            async with self.lock:
                await self.apply(
                    self.machine.emit_bot_persona(turn.seat, turn.round, action)
                )
        await asyncio.sleep((turn.submit_offset_ms - elapsed) / 1000)
        async with self.lock:
            await self.apply(self.machine.submit_bot_turn(turn))

    async def _run_decision_timer(self, round_index: int) -> None:
        await asyncio.sleep(self.machine.scenario.timeout_seconds)
        async with self.lock:
            await self.apply(self.machine.on_decision_timeout(round_index))

    async def _advance_after_hold(self) -> None:
        await asyncio.sleep(self.machine.scenario.reveal_hold_ms / 1000)
        async with self.lock:
            await self.apply(self.machine.advance_round())

    async def _finish(self) -> None:
        if self.closed:
            return
        self.closed = True
        self.sink.close()
        current = asyncio.current_task()
        for task in list(self.tasks):
            if task is not current:
                task.cancel()
        for conn in list(self.connections.values()):
            self.spawn(conn.close())


class GameServer:
    def __init__(
        self,
        scenario: Scenario,
        *,
        seed: int = 0,
        log_dir: Path,
        ui_dir: Optional[Path] = None,
    ) -> None:
        protocol.ensure_wire_exact(scenario.game)
        self.scenario = scenario
        self.seed = seed
        self.log_dir = Path(log_dir)
        self.ui_dir = Path(ui_dir) if ui_dir is not None else None
        self.sessions: dict[str, LiveSession] = {}
        self._server = None

    async def start(self, host: str, port: int) -> None:
        self._server = await serve(
            self._handle_connection,
            host,
            port,
            process_request=self._process_request,
        )

    @property
    def port(self) -> int:
        assert self._server is not None
        return self._server.sockets[0].getsockname()[1]

    async def serve_forever(self) -> None:
        assert self._server is not None
        await self._server.serve_forever()

    async def close(self) -> None:
        for session in self.sessions.values():
            async with session.lock:
                if not session.closed:
                    await session._finish()
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    # -- session management -------------------------------------------------

    async def _ensure_session(self, session_id: str) -> LiveSession:
        session = self.sessions.get(session_id)
        if session is not None:
            return session
        sink = LogSink.open(self.log_dir / f"{session_id}.ndjson")
        rng = random.Random(f"{self.seed}:{session_id}")
        machine = SessionMachine(self.scenario, session_id, rng, _wall_clock_ms)
        session = LiveSession(machine, sink)
        self.sessions[session_id] = session
        async with session.lock:
            await session.apply(machine.bootstrap())
        log.info("session %s created (log %s)", session_id, sink.path)
        return session

    async def _handle_connection(self, conn: ServerConnection) -> None:
        session: Optional[LiveSession] = None
        seat_id: Optional[int] = None
        try:
            raw = await conn.recv()
            try:
                message = protocol.parse_client_message(raw)
            except protocol.WireError as exc:
                await conn.send(protocol.encode(protocol.error(exc.code, str(exc))))
                return
            if message["type"] != protocol.MSG_JOIN:
                await conn.send(
                    protocol.encode(
                        protocol.error(
                            protocol.ERR_UNKNOWN_SESSION,
                            "join a session before sending anything else",
                        )
                    )
                )
                return
            session = await self._ensure_session(message["session"])
            async with session.lock:
                if session.closed or not session.machine.has_free_seat():
                    await conn.send(
                        protocol.encode(
                            protocol.error(
                                protocol.ERR_SESSION_FULL,
                                "no free seat in this session",
                            )
                        )
                    )
                    return
                seat_id, effects = session.machine.seat_human(message["name"])
                assert seat_id is not None
                self_name = session.machine.seats[seat_id].display_name
                log.info(
                    "session %s: seat %d taken by %r",
                    session.machine.session_id, seat_id, self_name,
                )
                session.connections[seat_id] = conn
                await session.apply(effects)

            async for raw in conn:
                try:
                    message = protocol.parse_client_message(raw)
                except protocol.WireError as exc:
                    await conn.send(
                        protocol.encode(protocol.error(exc.code, str(exc)))
                    )
                    continue
                if message["type"] == protocol.MSG_JOIN:
                    await conn.send(
                        protocol.encode(
                            protocol.error(protocol.ERR_MALFORMED, "already joined")
                        )
                    )
                    continue
                async with session.lock:
                    await session.apply(session.machine.handle_message(seat_id, message))
        except ConnectionClosed:
            pass
        finally:
            if session is not None and seat_id is not None:
                session.connections.pop(seat_id, None)
                async with session.lock:
                    await session.apply(session.machine.handle_disconnect(seat_id))

    # -- static UI ------------------------------------------------------------

    def _process_request(
        self, conn: ServerConnection, request: Request
    ) -> Optional[Response]:
        if "websocket" in request.headers.get("Upgrade", "").lower():
            return None
        if self.ui_dir is None:
            return conn.respond(HTTPStatus.NOT_FOUND, "no UI bundle configured\n")
        path = request.path.split("?", 1)[0]
        name = path.lstrip("/") or "index.html"
        target = (self.ui_dir / name).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            return conn.respond(HTTPStatus.NOT_FOUND, "not found\n")
        content_type = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        body = target.read_bytes()
        headers = Headers()
        headers["Content-Type"] = content_type
        headers["Content-Length"] = str(len(body))
        return Response(HTTPStatus.OK, "OK", headers, body)
