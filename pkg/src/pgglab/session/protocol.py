"""Wire protocol: message schemas, money encoding, questionnaire validation.

One UTF-8 text frame per message, each a JSON object with a required
"type" field. Contributions travel as integer cents; computed quantities
(pool, share, payoffs, cumulative scores) as integer milli-euros. Configs
whose computed quantities would not be exact integer milli-euros are
rejected before serving, never silently rounded.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Optional

from ..core import (
    ConfigError,
    GameConfig,
    Money,
    RoundResult,
    to_cents,
    to_milli,
    validate_config,
)

# Client -> server message types.
MSG_JOIN = "join"
MSG_CONTRIBUTE = "contribute"
MSG_QUESTIONNAIRE = "questionnaire"

# Server -> client message types.
MSG_WELCOME = "welcome"
MSG_ROUND_START = "round_start"
MSG_CONTRIBUTION_ACK = "contribution_ack"
MSG_ROUND_RESULT = "round_result"
MSG_PERSONA_EVENT = "persona_event"
MSG_GAME_OVER = "game_over"
MSG_ERROR = "error"

# Error codes carried in error{code, message}.
ERR_MALFORMED = "malformed"
ERR_UNKNOWN_SESSION = "unknown_session"
ERR_SESSION_FULL = "session_full"
ERR_OUT_OF_PHASE = "out_of_phase"
ERR_DUPLICATE_CONTRIBUTION = "duplicate_contribution"
ERR_ILLEGAL_AMOUNT = "illegal_amount"
ERR_DUPLICATE_QUESTIONNAIRE = "duplicate_questionnaire"
ERR_INVALID_QUESTIONNAIRE = "invalid_questionnaire"
ERR_SINK_UNAVAILABLE = "sink_unavailable"

PERCEIVED_ROLES = ("friend", "neighbor", "classmate", "stranger", "teacher", "relative")


class WireError(Exception):
    """A client message that cannot be accepted; carries the wire error code."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class QuestionnaireResponse:
    """Post-game questionnaire answers from one human seat."""

    seen_robot_before: bool
    generosity: int
    perceived_role: str
    age: Optional[int] = None
    gender: Optional[str] = None

    def to_json(self) -> dict[str, Any]:
        data = asdict(self)
        return {key: value for key, value in data.items() if value is not None}


def parse_questionnaire(answers: Any) -> QuestionnaireResponse:
    if not isinstance(answers, dict):
        raise WireError(ERR_INVALID_QUESTIONNAIRE, "answers must be an object")
    generosity = answers.get("generosity")
    if not isinstance(generosity, int) or not 1 <= generosity <= 5:
        raise WireError(
            ERR_INVALID_QUESTIONNAIRE, "generosity must be an integer from 1 to 5"
        )
    role = answers.get("perceived_role")
    if role not in PERCEIVED_ROLES:
        raise WireError(
            ERR_INVALID_QUESTIONNAIRE,
            f"perceived_role must be one of {', '.join(PERCEIVED_ROLES)}",
        )
    seen = answers.get("seen_robot_before")
    if not isinstance(seen, bool):
        raise WireError(ERR_INVALID_QUESTIONNAIRE, "seen_robot_before must be a boolean")
    age = answers.get("age")
    if age is not None and (not isinstance(age, int) or age < 0):
        raise WireError(ERR_INVALID_QUESTIONNAIRE, "age must be a non-negative integer")
    gender = answers.get("gender")
    if gender is not None and not isinstance(gender, str):
        raise WireError(ERR_INVALID_QUESTIONNAIRE, "gender must be a string")
    return QuestionnaireResponse(
        seen_robot_before=seen,
        generosity=generosity,
        perceived_role=role,
        age=age,
        gender=gender,
    )


# ---------------------------------------------------------------------------
# Config <-> JSON


def config_to_json(config: GameConfig) -> dict[str, Any]:
    return {
        "num_players": config.num_players,
        "num_rounds": config.num_rounds,
        "endowment_cents": to_cents(config.endowment),
        "allowed_cents": [to_cents(a) for a in config.allowed_contributions],
        "multiplier": [config.multiplier.numerator, config.multiplier.denominator],
    }


def config_from_json(data: dict[str, Any]) -> GameConfig:
    num, den = data["multiplier"]
    return validate_config(
        num_players=data["num_players"],
        num_rounds=data["num_rounds"],
        endowment=Fraction(data["endowment_cents"], 100),
        allowed_contributions=[Fraction(c, 100) for c in data["allowed_cents"]],
        multiplier=Fraction(num, den),
    )


def ensure_wire_exact(config: GameConfig) -> None:
    """Reject configs whose computed quantities are not exact milli-euros.

    Sufficient and necessary: endowment and every allowed amount must be
    whole cents, and for each allowed amount a both multiplier*a and
    multiplier*a/num_players must be whole milli-euros (single-contributor
    profiles give necessity, linearity of the pool gives sufficiency).
    """
    try:
        to_cents(config.endowment)
        for amount in config.allowed_contributions:
            to_cents(amount)
    except ValueError as exc:
        raise ConfigError(f"amounts must be whole cents for the wire: {exc}") from exc
    for amount in config.allowed_contributions:
        multiplied = config.multiplier * amount
        share = multiplied / config.num_players
        if (multiplied * 1000).denominator != 1 or (share * 1000).denominator != 1:
            raise ConfigError(
                f"contribution {amount} yields a non-terminating share under "
                f"multiplier {config.multiplier} and {config.num_players} players; "
                "refusing to serve inexact milli-euro payloads"
            )


# ---------------------------------------------------------------------------
# Server -> client message builders


def welcome(player_id: int, config: GameConfig, seats: list[dict[str, Any]]) -> dict:
    return {
        "type": MSG_WELCOME,
        "player_id": player_id,
        "config": config_to_json(config),
        "seats": seats,
    }


def round_start(round_index: int, round_of: int) -> dict:
    return {"type": MSG_ROUND_START, "round": round_index, "round_of": round_of}


def contribution_ack(round_index: int) -> dict:
    return {"type": MSG_CONTRIBUTION_ACK, "round": round_index}


def round_result_payload(
    result: RoundResult, cumulative: tuple[Money, ...]
) -> dict[str, Any]:
    """The reveal body, shared verbatim by the wire message and the log event."""
    return {
        "round": result.round_index,
        "contributions_cents": [to_cents(a) for a in result.contributions],
        "pool_milli": to_milli(result.pool),
        "multiplied_milli": to_milli(result.multiplied_pool),
        "share_milli": to_milli(result.share),
        "payoffs_milli": [to_milli(p) for p in result.payoffs],
        "cumulative_milli": [to_milli(s) for s in cumulative],
    }


def round_result(result: RoundResult, cumulative: tuple[Money, ...]) -> dict:
    return {"type": MSG_ROUND_RESULT, **round_result_payload(result, cumulative)}


def persona_event(player_id: int, action_id: str) -> dict:
    return {"type": MSG_PERSONA_EVENT, "player_id": player_id, "action_id": action_id}


def game_over(final_scores_milli: list[int]) -> dict:
    return {"type": MSG_GAME_OVER, "final_scores_milli": final_scores_milli}


def error(code: str, message: str) -> dict:
    return {"type": MSG_ERROR, "code": code, "message": message}


# ---------------------------------------------------------------------------
# Client -> server parsing


def parse_client_message(raw: str) -> dict[str, Any]:
    """Strictly parse one inbound frame. Raises WireError on any defect."""
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise WireError(ERR_MALFORMED, f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "type" not in data:
        raise WireError(ERR_MALFORMED, "message must be an object with a type field")
    kind = data["type"]
    if kind == MSG_JOIN:
        session = data.get("session")
        name = data.get("name", "")
        if not isinstance(session, str) or not session:
            raise WireError(ERR_MALFORMED, "join requires a non-empty session")
        if not isinstance(name, str):
            raise WireError(ERR_MALFORMED, "join name must be a string")
        return {"type": kind, "session": session, "name": name}
    if kind == MSG_CONTRIBUTE:
        round_index = data.get("round")
        amount = data.get("amount_cents")
        if not isinstance(round_index, int) or round_index < 0:
            raise WireError(ERR_MALFORMED, "contribute requires a round index")
        if not isinstance(amount, int) or isinstance(amount, bool):
            raise WireError(ERR_MALFORMED, "amount_cents must be an integer")
        return {"type": kind, "round": round_index, "amount_cents": amount}
    if kind == MSG_QUESTIONNAIRE:
        return {"type": kind, "answers": data.get("answers")}
    raise WireError(ERR_MALFORMED, f"unknown message type {kind!r}")


def encode(message: dict[str, Any]) -> str:
    return json.dumps(message, separators=(",", ":"), sort_keys=True)
