"""Append-only session event log: one JSON object per line, flushed per write.

Replaying a log reconstructs the full game contribution by contribution,
so a write failure aborts the session rather than silently losing data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, IO, Optional

SCHEMA_VERSION = 1

EV_SESSION_STARTED = "session_started"
EV_JOINED = "joined"
EV_ROUND_STARTED = "round_started"
EV_CONTRIBUTION_SUBMITTED = "contribution_submitted"
EV_ROUND_REVEALED = "round_revealed"
EV_PERSONA_EVENT = "persona_event"
EV_QUESTIONNAIRE_SUBMITTED = "questionnaire_submitted"
EV_GAME_OVER = "game_over"
EV_ERROR = "error"

_ENVELOPE_KEYS = ("v", "ts", "session", "type")


class SinkUnavailable(Exception):
    """The log sink cannot accept writes; the session must abort."""


@dataclass(frozen=True)
class SessionEvent:
    """One timestamped, append-only log record."""

    timestamp_ms: int
    session_id: str
    type: str
    data: dict[str, Any] = field(default_factory=dict)

    def to_line(self) -> str:
        record = {
            "v": SCHEMA_VERSION,
            "ts": self.timestamp_ms,
            "session": self.session_id,
            "type": self.type,
            **self.data,
        }
        return json.dumps(record, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_line(cls, line: str) -> "SessionEvent":
        record = json.loads(line)
        if not isinstance(record, dict):
            raise ValueError("event line is not an object")
        for key in _ENVELOPE_KEYS:
            if key not in record:
                raise ValueError(f"event line missing {key!r}")
        version = record["v"]
        if version != SCHEMA_VERSION:
            raise SchemaVersionMismatch(
                f"log schema v{version}, this reader understands v{SCHEMA_VERSION}"
            )
        data = {k: v for k, v in record.items() if k not in _ENVELOPE_KEYS}
        return cls(
            timestamp_ms=record["ts"],
            session_id=record["session"],
            type=record["type"],
            data=data,
        )


class SchemaVersionMismatch(Exception):
    """The log was written by an incompatible schema version."""


class LogSink:
    """Writes events as newline-delimited JSON, flushing after every line."""

    def __init__(self, stream: IO[str], path: Optional[Path] = None) -> None:
        self._stream = stream
        self.path = path

    @classmethod
    def open(cls, path: Path) -> "LogSink":
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            stream = path.open("a", encoding="utf-8")
        except OSError as exc:
            raise SinkUnavailable(f"cannot open log {path}: {exc}") from exc
        return cls(stream, path=path)

    def append(self, event: SessionEvent) -> None:
        try:
            self._stream.write(event.to_line() + "\n")
            self._stream.flush()
        except (OSError, ValueError) as exc:
            raise SinkUnavailable(f"log write failed: {exc}") from exc

    def close(self) -> None:
        try:
            self._stream.close()
        except OSError:
            pass


class MemorySink:
    """In-memory sink for tests and headless simulation."""

    def __init__(self) -> None:
        self.lines: list[str] = []

    def append(self, event: SessionEvent) -> None:
        self.lines.append(event.to_line())

    def close(self) -> None:
        pass
