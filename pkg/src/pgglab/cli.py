"""Command line interface: serve, simulate, analyze, bot.

One binary covers the whole workflow: run the live session server, run
seeded headless tournaments, summarize logs, and drive a scripted bot
client against a running server.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .analysis import (
    DistributionReport,
    QuestionnaireSummary,
    TournamentSpec,
    contribution_distribution,
    load_log,
    per_round_series,
    questionnaire_responses,
    questionnaire_summary,
    simulate,
    trial_records,
    write_session_logs,
)
from .botclient import run_bot_client
from .core import (
    ConfigError,
    GameError,
    format_eur,
    from_cents,
    to_cents,
    validate_config,
)
from .session.config import default_scenario, load_scenario, parse_exact
from .session.server import GameServer

log = logging.getLogger("pgglab")


def _parse_listen(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected host:port, got {value!r}")
    return host, int(port)


def _parse_window(value: str) -> tuple[int, int]:
    parts = value.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi got {value!r}")
    low, high = int(parts[0]), int(parts[1])
    if low < 0 or high < low:
        raise argparse.ArgumentTypeError(f"invalid window {value!r}")
    return low, high


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgglab",
        description="Public good game sessions, tournaments, and log analysis.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    serve = commands.add_parser("serve", help="run the live session server")
    serve.add_argument("--config", type=Path, help="scenario YAML (default: pilot setup)")
    serve.add_argument("--listen", type=_parse_listen, help="host:port to bind")
    serve.add_argument("--log-dir", type=Path, help="directory for session logs")
    serve.add_argument("--seed", type=int, default=0, help="server RNG seed")
    serve.add_argument(
        "--serve-ui",
        type=Path,
        metavar="DIR",
        help="also serve this static UI bundle over plain HTTP",
    )

    sim = commands.add_parser("simulate", help="run seeded headless tournaments")
    sim.add_argument(
        "--players",
        required=True,
        help="comma-separated strategy tokens, one per seat (ac|afr|tft)",
    )
    sim.add_argument("--rounds", type=int, default=10)
    sim.add_argument("--multiplier", default="8/5", help='exact, e.g. "1.6" or "8/5"')
    sim.add_argument("--endowment-cents", type=int, default=100)
    sim.add_argument("--allowed-cents", default="0,50,100")
    sim.add_argument("--games", type=int, default=1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", type=Path, help="write one log file per game here")
    sim.add_argument("--json-out", type=Path, help="write the report as JSON")

    ana = commands.add_parser("analyze", help="summarize session logs")
    ana.add_argument("--log", type=Path, required=True, help="log file or directory")
    ana.add_argument(
        "--report", choices=("dist", "rounds", "questionnaire"), required=True
    )
    ana.add_argument("--include-bots", action="store_true")
    ana.add_argument("--json-out", type=Path, help="write the report as JSON")

    bot = commands.add_parser("bot", help="headless bot client for a live server")
    bot.add_argument("--connect", required=True, help="host:port of the server")
    bot.add_argument("--session", required=True)
    bot.add_argument("--strategy", required=True, help="ac | afr | tft")
    bot.add_argument("--seed", type=int, default=0)
    bot.add_argument("--name")
    bot.add_argument("--delay-ms", type=_parse_window, default=(0, 0))

    return parser


# ---------------------------------------------------------------------------
# Report rendering


def distribution_text(report: DistributionReport) -> str:
    kind = "all players" if report.include_bots else "human players"
    lines = [f"Contribution distribution ({kind}, {report.total_trials} trials)"]
    lines.append(f"  {'amount':>8}  {'count':>6}  {'percent':>8}")
    for amount, count in report.counts.items():
        lines.append(
            f"  {format_eur(from_cents(amount)):>6} €"
            f"  {count:>6}"
            f"  {report.percent_text(amount):>7}%"
        )
    return "\n".join(lines)


def distribution_json(report: DistributionReport) -> dict:
    return {
        "report": "distribution",
        "include_bots": report.include_bots,
        "total_trials": report.total_trials,
        "rows": [
            {
                "amount_cents": amount,
                "count": count,
                "percent": report.percent_tenths[amount] / 10,
            }
            for amount, count in report.counts.items()
        ],
    }


def rounds_text(series) -> str:
    lines = ["Mean contribution per round (cents)"]
    lines.append(f"  {'round':>5}  {'mean':>7}")
    for round_index, _, text in series:
        lines.append(f"  {round_index + 1:>5}  {text:>7}")
    return "\n".join(lines)


def rounds_json(series) -> dict:
    return {
        "report": "per_round",
        "rows": [
            {
                "round": round_index,
                "mean_cents_text": text,
                "mean_cents_exact": [mean.numerator, mean.denominator],
            }
            for round_index, mean, text in series
        ],
    }


def questionnaire_text(summary: QuestionnaireSummary) -> str:
    lines = [f"Questionnaire (n = {summary.n})"]
    sd_note = "sample, n-1" if summary.sd_kind == "sample" else "undefined for n=1"
    lines.append(
        f"  generosity: mean {summary.generosity_mean:.1f},"
        f" SD {summary.generosity_sd:.1f} ({sd_note})"
    )
    lines.append("  perceived role:")
    for role, count in summary.role_counts.items():
        lines.append(
            f"    {role:<10} {count:>4}  {summary.role_percent_text(role):>6}%"
        )
    return "\n".join(lines)


def questionnaire_json(summary: QuestionnaireSummary) -> dict:
    return {
        "report": "questionnaire",
        "n": summary.n,
        "generosity_mean": summary.generosity_mean,
        "generosity_sd": summary.generosity_sd,
        "sd_kind": summary.sd_kind,
        "roles": [
            {
                "role": role,
                "count": count,
                "percent": summary.role_percent_tenths[role] / 10,
            }
            for role, count in summary.role_counts.items()
        ],
    }


def mean_scores_text(mean_final_scores: dict[str, Fraction]) -> str:
    lines = ["Mean final scores by strategy"]
    for token, score in sorted(mean_final_scores.items()):
        lines.append(f"  {token:<4} {format_eur(score):>8} €")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Commands


def cmd_serve(args) -> int:
    scenario = load_scenario(args.config) if args.config else default_scenario()
    if args.listen:
        host, port = args.listen
    else:
        host, port = _parse_listen(scenario.listen)
    log_dir = args.log_dir if args.log_dir else Path(scenario.log_dir)
    server = GameServer(
        scenario, seed=args.seed, log_dir=log_dir, ui_dir=args.serve_ui
    )

    async def run() -> None:
        await server.start(host, port)
        bound = server.port
        log.info("listening on ws://%s:%d (logs in %s)", host, bound, log_dir)
        if args.serve_ui:
            log.info("serving UI bundle from %s on http://%s:%d/", args.serve_ui, host, bound)
        try:
            await server.serve_forever()
        except asyncio.CancelledError:
            pass
        finally:
            await server.close()

    try:
        asyncio.run(run())
    except KeyboardInterrupt:
        log.info("shutting down")
    return 0


def cmd_simulate(args) -> int:
    tokens = tuple(token.strip().lower() for token in args.players.split(","))
    allowed = [int(c) for c in args.allowed_cents.split(",")]
    config = validate_config(
        num_players=len(tokens),
        num_rounds=args.rounds,
        endowment=Fraction(args.endowment_cents, 100),
        allowed_contributions=[Fraction(c, 100) for c in allowed],
        multiplier=parse_exact(args.multiplier, what="multiplier"),
    )
    spec = TournamentSpec(
        config=config, seat_strategies=tokens, games=args.games, seed=args.seed
    )
    result = simulate(spec)

    print(
        f"Tournament: seats [{', '.join(tokens)}], {args.games} game(s),"
        f" {args.rounds} rounds, seed {args.seed}"
    )
    print(mean_scores_text(result.mean_final_scores))
    print(distribution_text(result.distribution))
    if args.out:
        paths = write_session_logs(result, args.out)
        print(f"Wrote {len(paths)} session log(s) to {args.out}")
    if args.json_out:
        document = {
            "report": "tournament",
            "players": list(tokens),
            "games": args.games,
            "rounds": args.rounds,
            "seed": args.seed,
            "mean_final_scores": [
                {
                    "strategy": token,
                    "mean_eur_exact": [score.numerator, score.denominator],
                    "mean_eur_text": format_eur(score),
                }
                for token, score in sorted(result.mean_final_scores.items())
            ],
            "distribution": distribution_json(result.distribution),
        }
        args.json_out.write_text(json.dumps(document, indent=2) + "\n")
        print(f"Wrote JSON report to {args.json_out}")
    return 0


def _collect_log_files(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(path.glob("*.ndjson"))
        if not files:
            raise FileNotFoundError(f"no .ndjson logs in {path}")
        return files
    if not path.exists():
        raise FileNotFoundError(f"no such log: {path}")
    return [path]


def cmd_analyze(args) -> int:
    files = _collect_log_files(args.log)
    all_events = []
    config = None
    for file in files:
        file_config, events = load_log(file)
        config = config or file_config
        all_events.extend(events)

    if args.report == "dist":
        allowed = (
            [to_cents(a) for a in config.allowed_contributions] if config else None
        )
        report = contribution_distribution(
            trial_records(all_events),
            include_bots=args.include_bots,
            allowed_cents=allowed,
        )
        print(distribution_text(report))
        document = distribution_json(report)
    elif args.report == "rounds":
        series = per_round_series(
            trial_records(all_events), include_bots=args.include_bots
        )
        print(rounds_text(series))
        document = rounds_json(series)
    else:
        summary = questionnaire_summary(questionnaire_responses(all_events))
        print(questionnaire_text(summary))
        document = questionnaire_json(summary)

    if args.json_out:
        args.json_out.write_text(json.dumps(document, indent=2) + "\n")
        print(f"Wrote JSON report to {args.json_out}")
    return 0


def cmd_bot(args) -> int:
    uri = f"ws://{args.connect}"
    trace = asyncio.run(
        run_bot_client(
            uri,
            args.session,
            args.strategy,
            seed=args.seed,
            name=args.name,
            delay_ms=args.delay_ms,
        )
    )
    rounds = sum(1 for m in trace.inbound if m["type"] == "round_result")
    print(f"seat {trace.player_id}: played {rounds} round(s) as {args.strategy}")
    for message in trace.errors:
        print(f"  server error {message['code']}: {message['message']}")
    if trace.final_scores_milli is not None:
        scores = ", ".join(
            format_eur(Fraction(milli, 1000)) for milli in trace.final_scores_milli
        )
        print(f"final scores: {scores} €")
        return 0
    print("session ended without final scores", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": cmd_serve,
        "simulate": cmd_simulate,
        "analyze": cmd_analyze,
        "bot": cmd_bot,
    }
    try:
        return handlers[args.command](args)
    except (GameError, ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
