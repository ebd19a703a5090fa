// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import { joinSession, type App, type SocketLike } from "../src/app.js";
import type { ServerMessage } from "../src/protocol.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  onopen: ((event?: unknown) => void) | null = null;
  onmessage: ((event: { data: unknown }) => void) | null = null;
  onclose: ((event?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {}

  open(): void {
    this.onopen?.();
  }

  deliver(message: ServerMessage): void {
    this.onmessage?.({ data: JSON.stringify(message) });
  }
}

const CONFIG = {
  num_players: 4,
  num_rounds: 10,
  endowment_cents: 100,
  allowed_cents: [0, 50, 100],
  multiplier: [8, 5] as [number, number],
};

const SEATS = [
  { player_id: 0, name: "iCub", is_bot: true, connected: true },
  { player_id: 1, name: "ada", is_bot: false, connected: true },
  { player_id: 2, name: "bo", is_bot: false, connected: false },
  { player_id: 3, name: "cy", is_bot: false, connected: false },
];

function setup(): { root: HTMLElement; socket: FakeSocket; app: App } {
  document.body.innerHTML = '<main id="app"></main>';
  const root = document.getElementById("app") as HTMLElement;
  const socket = new FakeSocket();
  const app = joinSession(root, "dom-test", "ada", {
    serverUrl: "ws://test.invalid",
    createSocket: () => socket,
  });
  socket.open();
  socket.deliver({ type: "welcome", player_id: 1, config: CONFIG, seats: SEATS });
  return { root, socket, app };
}

function startRound(socket: FakeSocket, round: number): void {
  socket.deliver({ type: "round_start", round, round_of: 10 });
}

const RESULT: ServerMessage = {
  type: "round_result",
  round: 0,
  contributions_cents: [100, 50, 0, 0],
  pool_milli: 1500,
  multiplied_milli: 2400,
  share_milli: 600,
  payoffs_milli: [600, 1100, 1600, 1600],
  cumulative_milli: [600, 1100, 1600, 1600],
};

describe("decision screen", () => {
  it("shows exactly three euro choices with the pilot labels", () => {
    const { root, socket } = setup();
    startRound(socket, 0);
    const buttons = root.querySelectorAll<HTMLButtonElement>(".choice-btn");
    expect(buttons).toHaveLength(3);
    expect([...buttons].map((b) => b.textContent)).toEqual([
      "0.00 €",
      "0.50 €",
      "1.00 €",
    ]);
    expect([...buttons].every((b) => !b.disabled)).toBe(true);
    expect(root.querySelector(".banner")?.textContent).toBe("Round 1 of 10");
  });

  it("clicking sends cents for the current round, ack locks the controls", () => {
    const { root, socket } = setup();
    startRound(socket, 0);
    const buttons = root.querySelectorAll<HTMLButtonElement>(".choice-btn");
    buttons[1].click();
    expect(JSON.parse(socket.sent.at(-1)!)).toEqual({
      type: "contribute",
      round: 0,
      amount_cents: 50,
    });
    socket.deliver({ type: "contribution_ack", round: 0 });
    const locked = root.querySelectorAll<HTMLButtonElement>(".choice-btn");
    expect([...locked].every((b) => b.disabled)).toBe(true);
    expect(root.querySelector(".status-waiting")?.textContent).toContain(
      "Waiting for the other players",
    );
  });

  it("a server rejection is shown verbatim and re-enables the choices", () => {
    const { root, socket } = setup();
    startRound(socket, 0);
    root.querySelectorAll<HTMLButtonElement>(".choice-btn")[0].click();
    socket.deliver({
      type: "error",
      code: "illegal_amount",
      message: "75 cents is not one of [0, 50, 100]",
    });
    expect(root.querySelector(".error-text")?.textContent).toBe(
      "illegal_amount: 75 cents is not one of [0, 50, 100]",
    );
    expect(root.querySelector(".error-hint")).not.toBeNull();
    const buttons = root.querySelectorAll<HTMLButtonElement>(".choice-btn");
    expect([...buttons].every((b) => !b.disabled)).toBe(true);
  });

  it("never shows any contribution cell during a decision", () => {
    const { root, socket } = setup();
    startRound(socket, 0);
    socket.deliver({ type: "contribution_ack", round: 0 });
    expect(root.querySelector(".cell-contribution")).toBeNull();
    expect(root.querySelector(".reveal-table")).toBeNull();
  });

  it("persona events appear as seat-attributed transient notes", () => {
    const { root, socket } = setup();
    startRound(socket, 0);
    socket.deliver({ type: "persona_event", player_id: 0, action_id: "think_aloud" });
    const items = root.querySelectorAll(".persona-item");
    expect(items).toHaveLength(1);
    expect(items[0].textContent).toBe("iCub: think_aloud");
  });
});

describe("reveal screen", () => {
  it("renders the table with every wire integer at two decimals", () => {
    const { root, socket } = setup();
    startRound(socket, 0);
    socket.deliver({ type: "contribution_ack", round: 0 });
    socket.deliver(RESULT);

    const table = root.querySelector(".reveal-table") as HTMLElement;
    expect(table.dataset.round).toBe("0");
    const contributions = [...root.querySelectorAll(".cell-contribution")].map(
      (cell) => cell.textContent,
    );
    expect(contributions).toEqual([
      "1.00 €",
      "0.50 €",
      "0.00 €",
      "0.00 €",
    ]);
    const payoffs = [...root.querySelectorAll(".cell-payoff")].map(
      (cell) => cell.textContent,
    );
    expect(payoffs).toEqual([
      "0.60 €",
      "1.10 €",
      "1.60 €",
      "1.60 €",
    ]);
    expect(root.querySelector(".pool-line")?.textContent).toBe(
      "Pool 1.50 € × multiplier = 2.40 €, equal share 0.60 €",
    );
  });
});

describe("protocol errors are loud", () => {
  it("an out-of-order message replaces the screen with an error state", () => {
    const { root, socket } = setup();
    socket.deliver(RESULT); // before any round_start
    expect(root.querySelector(".screen-protocol-error")).not.toBeNull();
    expect(
      root.querySelector(".protocol-error-detail")?.textContent,
    ).toContain("round_result");
  });

  it("an unparseable frame does the same", () => {
    const { root, app } = setup();
    app.processFrame("garbage{{{");
    expect(root.querySelector(".screen-protocol-error")).not.toBeNull();
  });
});

describe("questionnaire", () => {
  function finishGame(socket: FakeSocket): void {
    for (let k = 0; k < 10; k += 1) {
      startRound(socket, k);
      socket.deliver({ type: "contribution_ack", round: k });
      socket.deliver({ ...RESULT, round: k } as ServerMessage);
    }
    socket.deliver({
      type: "game_over",
      final_scores_milli: [6000, 11000, 16000, 16000],
    });
  }

  it("final screen shows scores and the form with six roles and a 1-5 scale", () => {
    const { root, socket } = setup();
    finishGame(socket);
    const finals = [...root.querySelectorAll(".final-score")].map(
      (item) => item.textContent,
    );
    expect(finals).toEqual([
      "iCub: 6.00 €",
      "ada (you): 11.00 €",
      "bo: 16.00 €",
      "cy: 16.00 €",
    ]);
    const roles = [...root.querySelectorAll(".role-option")].map(
      (label) => label.textContent,
    );
    expect(roles).toEqual([
      "friend",
      "neighbor",
      "classmate",
      "stranger",
      "teacher",
      "relative",
    ]);
    const scale = root.querySelectorAll('input[name="generosity"]');
    expect(scale).toHaveLength(5);
    expect(root.textContent).toContain("not generous at all");
    expect(root.textContent).toContain("very generous");
  });

  it("validates before sending and sends exactly once", () => {
    const { root, socket } = setup();
    finishGame(socket);
    const sentBefore = socket.sent.length;
    (root.querySelector(".q-submit") as HTMLButtonElement).click();
    expect(root.querySelector(".q-problem")?.textContent).toContain("generosity");
    expect(socket.sent.length).toBe(sentBefore);

    (root.querySelector('input[name="generosity"][value="5"]') as HTMLInputElement).click();
    (root.querySelector(".q-submit") as HTMLButtonElement).click();
    expect(root.querySelector(".q-problem")?.textContent).toContain("role");
    expect(socket.sent.length).toBe(sentBefore);

    (root.querySelector('input[name="perceived_role"][value="friend"]') as HTMLInputElement).click();
    (root.querySelector(".q-submit") as HTMLButtonElement).click();
    expect(socket.sent.length).toBe(sentBefore + 1);
    expect(JSON.parse(socket.sent.at(-1)!)).toEqual({
      type: "questionnaire",
      answers: {
        seen_robot_before: false,
        generosity: 5,
        perceived_role: "friend",
      },
    });
    expect(root.querySelector(".q-form")).toBeNull();
    expect(root.querySelector(".q-done")).not.toBeNull();
  });
});
