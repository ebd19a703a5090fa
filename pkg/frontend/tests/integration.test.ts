// @vitest-environment jsdom
//
// Scripted browser session against a live server from the Python package:
// the real client bundle (reducer + DOM) on a real WebSocket, two scripted
// co-players, one server-seated robot. Requires `pip install -e ..` so
// `python3 -m pgglab.cli` is importable.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync, existsSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { joinSession, type App, type SocketLike } from "../src/app.js";
import { milliToText } from "../src/money.js";

const SESSION = "ui-e2e";

const SCENARIO = `
game:
  num_players: 4
  num_rounds: 10
  endowment_cents: 100
  allowed_cents: [0, 50, 100]
  multiplier: "1.6"
seats: [ac, human, human, human]
display_names: [iCub]
bot_delay_ms: [1, 20]
reveal_hold_ms: 50
questionnaire: true
`;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });
}

function waitForPort(port: number, timeoutMs = 15000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  return new Promise((resolve, reject) => {
    const attempt = () => {
      const sock = net.connect(port, "127.0.0.1");
      sock.once("connect", () => {
        sock.destroy();
        resolve();
      });
      sock.once("error", () => {
        sock.destroy();
        if (Date.now() > deadline) reject(new Error("server never opened its port"));
        else setTimeout(attempt, 60);
      });
    };
    attempt();
  });
}

async function waitFor(
  condition: () => boolean,
  what: string,
  timeoutMs = 20000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!condition()) {
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
}

interface CoPlayerOutcome {
  finalsMilli: number[];
  errors: string[];
}

/** Raw scripted co-player: fixed amount, questionnaire, wait for close. */
function coPlayer(
  uri: string,
  name: string,
  amountForRound: (round: number) => number,
  round0DelayMs: number,
): Promise<CoPlayerOutcome> {
  return new Promise((resolve, reject) => {
    const sock = new WebSocket(uri);
    const errors: string[] = [];
    let finals: number[] = [];
    sock.on("open", () => {
      sock.send(JSON.stringify({ type: "join", session: SESSION, name }));
    });
    sock.on("message", (data) => {
      const message = JSON.parse(String(data));
      if (message.type === "round_start") {
        const send = () =>
          sock.send(
            JSON.stringify({
              type: "contribute",
              round: message.round,
              amount_cents: amountForRound(message.round),
            }),
          );
        setTimeout(send, message.round === 0 ? round0DelayMs : 0);
      } else if (message.type === "game_over") {
        finals = message.final_scores_milli;
        sock.send(
          JSON.stringify({
            type: "questionnaire",
            answers: {
              seen_robot_before: false,
              generosity: 4,
              perceived_role: "neighbor",
            },
          }),
        );
      } else if (message.type === "error") {
        errors.push(message.code);
      }
    });
    sock.on("close", () => resolve({ finalsMilli: finals, errors }));
    sock.on("error", (error) => reject(error));
  });
}

describe("scripted browser session against a live server", () => {
  let server: ChildProcess;
  let port: number;
  let logDir: string;
  let serverOutput = "";

  beforeAll(async () => {
    port = await freePort();
    const workDir = mkdtempSync(join(tmpdir(), "pgglab-ui-"));
    logDir = join(workDir, "logs");
    const scenarioPath = join(workDir, "scenario.yaml");
    writeFileSync(scenarioPath, SCENARIO);
    server = spawn(
      "python3",
      [
        "-m", "pgglab.cli", "serve",
        "--config", scenarioPath,
        "--listen", `127.0.0.1:${port}`,
        "--log-dir", logDir,
        "--seed", "33",
      ],
      { stdio: ["ignore", "pipe", "pipe"] },
    );
    server.stdout?.on("data", (chunk) => (serverOutput += String(chunk)));
    server.stderr?.on("data", (chunk) => (serverOutput += String(chunk)));
    await waitForPort(port);
  }, 30000);

  afterAll(() => {
    server?.kill();
  });

  it("joins, plays ten rounds privately, sees exact reveals, answers the questionnaire", async () => {
    const uri = `ws://127.0.0.1:${port}`;
    document.body.innerHTML = '<main id="app"></main>';
    const root = document.getElementById("app") as HTMLElement;

    const inbound: Array<Record<string, unknown>> = [];
    const createSocket = (url: string): SocketLike => {
      const sock = new WebSocket(url);
      sock.addEventListener("message", (event) => {
        inbound.push(JSON.parse(String(event.data)));
      });
      return sock as unknown as SocketLike;
    };

    // the client under test joins first and takes seat 1
    const app: App = joinSession(root, SESSION, "tester", {
      serverUrl: uri,
      createSocket,
    });
    await waitFor(
      () => root.textContent?.includes("Waiting for all players") ?? false,
      "the lobby screen",
    );

    // co-players delay round 0 so the ack-lock state is observable
    const others = [
      coPlayer(uri, "co1", () => 0, 250),
      coPlayer(uri, "co2", (round) => (round % 2 === 0 ? 100 : 50), 250),
    ];

    const buttons = () =>
      [...root.querySelectorAll<HTMLButtonElement>(".choice-btn")];
    const myAmounts: number[] = [];

    for (let round = 0; round < 10; round += 1) {
      await waitFor(
        () =>
          root.querySelector(".banner")?.textContent === `Round ${round + 1} of 10` &&
          buttons().length > 0 &&
          buttons().every((b) => !b.disabled),
        `decision screen of round ${round}`,
      );

      // exactly three choices, and nothing about current-round choices visible
      expect(buttons().map((b) => b.textContent)).toEqual([
        "0.00 €",
        "0.50 €",
        "1.00 €",
      ]);
      expect(root.querySelector(".cell-contribution")).toBeNull();

      const amount = [0, 50, 100][round % 3];
      myAmounts.push(amount);
      buttons()
        .find((b) => b.dataset.amountCents === String(amount))!
        .click();

      if (round === 0) {
        // ack arrives while the others still think: controls lock visibly
        await waitFor(
          () => root.querySelector(".status-waiting") !== null,
          "the locked waiting state",
        );
        expect(buttons().every((b) => b.disabled)).toBe(true);
      }
      await waitFor(
        () => app.view.lastResult?.round === round,
        `the reveal of round ${round}`,
      );
    }

    await waitFor(
      () => root.querySelector(".screen-final") !== null,
      "the final scores screen",
    );

    // the reveal table of the last round matches the wire integers exactly
    const lastResult = inbound
      .filter((m) => m.type === "round_result")
      .at(-1) as Record<string, any>;
    expect(lastResult.round).toBe(9);
    const payoffCells = [...root.querySelectorAll(".cell-payoff")].map(
      (cell) => cell.textContent,
    );
    expect(payoffCells).toEqual(
      lastResult.payoffs_milli.map((milli: number) => `${milliToText(milli)} €`),
    );
    const contributionCells = [
      ...root.querySelectorAll(".cell-contribution"),
    ].map((cell) => cell.textContent);
    expect(contributionCells[0]).toBe("1.00 €"); // the robot always cooperates

    const gameOver = inbound.find((m) => m.type === "game_over") as Record<string, any>;
    const finalTexts = [...root.querySelectorAll(".final-score")].map(
      (item) => item.textContent,
    );
    gameOver.final_scores_milli.forEach((milli: number, seat: number) => {
      expect(finalTexts[seat]).toContain(`${milliToText(milli)} €`);
    });

    // privacy over the real traffic: between round_start and round_result a
    // client only ever hears its own ack and persona tokens
    let inDecision = false;
    for (const message of inbound) {
      if (message.type === "round_start") inDecision = true;
      else if (message.type === "round_result") inDecision = false;
      else if (inDecision) {
        expect(["contribution_ack", "persona_event"]).toContain(message.type);
        expect(message).not.toHaveProperty("amount_cents");
        expect(message).not.toHaveProperty("contributions_cents");
      }
    }

    // questionnaire: six roles, 1-5 scale, validation, exactly one send
    expect(
      [...root.querySelectorAll(".role-option")].map((label) => label.textContent),
    ).toEqual(["friend", "neighbor", "classmate", "stranger", "teacher", "relative"]);
    expect(root.querySelectorAll('input[name="generosity"]')).toHaveLength(5);

    (root.querySelector(".q-submit") as HTMLButtonElement).click();
    expect(root.querySelector(".q-problem")?.textContent).not.toBe("");

    (root.querySelector('input[name="generosity"][value="5"]') as HTMLInputElement).click();
    (root.querySelector('input[name="perceived_role"][value="friend"]') as HTMLInputElement).click();
    (root.querySelector(".q-submit") as HTMLButtonElement).click();
    await waitFor(
      () => root.querySelector(".q-done") !== null,
      "the questionnaire confirmation",
    );

    // all three human seats answered, so the session closes server-side
    const outcomes = await Promise.all(others);
    for (const outcome of outcomes) {
      expect(outcome.errors).toEqual([]);
      expect(outcome.finalsMilli).toEqual(gameOver.final_scores_milli);
    }

    const logPath = join(logDir, `${SESSION}.ndjson`);
    await waitFor(() => existsSync(logPath), "the session log file");
    const lines = readFileSync(logPath, "utf-8").trim().split("\n");
    const events = lines.map((line) => JSON.parse(line));
    const ofType = (type: string) => events.filter((e) => e.type === type);
    expect(ofType("contribution_submitted")).toHaveLength(40);
    expect(ofType("round_revealed")).toHaveLength(10);
    expect(ofType("questionnaire_submitted")).toHaveLength(3);

    // our submissions were recorded verbatim, none timed out
    const mine = ofType("contribution_submitted").filter((e) => e.player === 1);
    expect(mine.map((e) => e.amount_cents)).toEqual(myAmounts);
    expect(mine.every((e) => e.timed_out === false)).toBe(true);

    const recordedRoles = ofType("questionnaire_submitted").map(
      (e) => e.answers.perceived_role,
    );
    expect(recordedRoles.sort()).toEqual(["friend", "neighbor", "neighbor"]);
  }, 60000);
});
