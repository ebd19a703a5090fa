// DOM rendering: one full re-render per state change. The view is small
// enough that rebuilding the screen beats bookkeeping partial updates.

import { centsToEuroLabel, centsToText, milliToText } from "./money.js";
import { PERCEIVED_ROLES, type QuestionnaireAnswers } from "./protocol.js";
import { canSubmit, type ClientView } from "./state.js";

export interface Handlers {
  onContribute: (amountCents: number) => void;
  onQuestionnaire: (answers: QuestionnaireAnswers) => void;
}

const GENEROSITY_LOW_LABEL = "not generous at all";
const GENEROSITY_HIGH_LABEL = "very generous";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function seatName(view: ClientView, seat: number): string {
  const info = view.seats.find((s) => s.player_id === seat);
  const name = info ? info.name : `player ${seat}`;
  return seat === view.mySeat ? `${name} (you)` : name;
}

function renderBanner(view: ClientView): HTMLElement {
  const banner = el("div", "banner");
  if (view.phase === "decision" || view.phase === "reveal") {
    banner.textContent = `Round ${view.round + 1} of ${view.roundOf}`;
  } else if (view.phase === "finished") {
    banner.textContent = "Game over";
  } else if (view.phase === "lobby") {
    banner.textContent = "Waiting for all players to join";
  }
  return banner;
}

function renderError(view: ClientView): HTMLElement | null {
  if (!view.lastError) return null;
  const box = el("div", "error-box");
  box.appendChild(
    el("div", "error-text", `${view.lastError.code}: ${view.lastError.message}`),
  );
  if (view.phase === "decision") {
    box.appendChild(el("div", "error-hint", "You can pick an amount again."));
  }
  return box;
}

function renderLobby(view: ClientView): HTMLElement {
  const screen = el("div", "screen screen-lobby");
  const list = el("ul", "seat-list");
  for (const seat of view.seats) {
    const label = seat.is_bot ? `${seat.name} (robot)` : seat.name;
    list.appendChild(el("li", "seat", label));
  }
  screen.appendChild(list);
  screen.appendChild(el("p", "hint", "The game starts when every seat is taken."));
  return screen;
}

function renderDecision(view: ClientView, handlers: Handlers): HTMLElement {
  const screen = el("div", "screen screen-decision");
  const config = view.config;
  if (!config) return screen;

  screen.appendChild(
    el("p", "prompt", "How much do you put into the common pool?"),
  );
  const choices = el("div", "choices");
  for (const cents of config.allowed_cents) {
    const button = el("button", "choice-btn", centsToEuroLabel(cents));
    button.dataset.amountCents = String(cents);
    button.disabled = !canSubmit(view);
    button.addEventListener("click", () => handlers.onContribute(cents));
    choices.appendChild(button);
  }
  screen.appendChild(choices);

  if (view.mySubmitted) {
    screen.appendChild(
      el("p", "status status-waiting", "Choice locked in. Waiting for the other players…"),
    );
  } else if (view.submissionPending) {
    screen.appendChild(el("p", "status status-pending", "Submitting…"));
  }

  if (view.personaFeed.length > 0) {
    const feed = el("ul", "persona-feed");
    for (const item of view.personaFeed) {
      feed.appendChild(
        el("li", "persona-item", `${seatName(view, item.seat)}: ${item.action}`),
      );
    }
    screen.appendChild(feed);
  }
  return screen;
}

function renderResultTable(view: ClientView): HTMLElement | null {
  const result = view.lastResult;
  if (!result) return null;
  const wrap = el("div", "reveal");
  const table = el("table", "reveal-table");
  table.dataset.round = String(result.round);

  const head = el("tr");
  for (const title of ["player", "contribution", "payoff", "total"]) {
    head.appendChild(el("th", undefined, title));
  }
  table.appendChild(head);

  result.contributions_cents.forEach((cents, seat) => {
    const row = el("tr", seat === view.mySeat ? "row-self" : undefined);
    row.appendChild(el("td", "cell-name", seatName(view, seat)));
    row.appendChild(el("td", "cell-contribution", `${centsToText(cents)} €`));
    row.appendChild(
      el("td", "cell-payoff", `${milliToText(result.payoffs_milli[seat])} €`),
    );
    row.appendChild(
      el("td", "cell-cumulative", `${milliToText(result.cumulative_milli[seat])} €`),
    );
    table.appendChild(row);
  });
  wrap.appendChild(table);

  wrap.appendChild(
    el(
      "p",
      "pool-line",
      `Pool ${milliToText(result.pool_milli)} € × multiplier = ` +
        `${milliToText(result.multiplied_milli)} €, ` +
        `equal share ${milliToText(result.share_milli)} €`,
    ),
  );
  return wrap;
}

function renderReveal(view: ClientView): HTMLElement {
  const screen = el("div", "screen screen-reveal");
  const table = renderResultTable(view);
  if (table) screen.appendChild(table);
  screen.appendChild(el("p", "hint", "Next round starts shortly…"));
  return screen;
}

function renderQuestionnaire(handlers: Handlers): HTMLElement {
  const form = el("form", "q-form") as HTMLFormElement;
  form.noValidate = true;

  const age = el("label", "q-age", "Age: ");
  const ageInput = el("input") as HTMLInputElement;
  ageInput.type = "number";
  ageInput.name = "age";
  ageInput.min = "0";
  age.appendChild(ageInput);
  form.appendChild(age);

  const gender = el("label", "q-gender", "Gender: ");
  const genderInput = el("input") as HTMLInputElement;
  genderInput.type = "text";
  genderInput.name = "gender";
  gender.appendChild(genderInput);
  form.appendChild(gender);

  const seen = el("label", "q-seen", "I had seen this robot before ");
  const seenInput = el("input") as HTMLInputElement;
  seenInput.type = "checkbox";
  seenInput.name = "seen_robot_before";
  seen.appendChild(seenInput);
  form.appendChild(seen);

  const generosity = el("fieldset", "q-generosity");
  generosity.appendChild(el("legend", undefined, "How generous did the robot seem to you?"));
  generosity.appendChild(el("span", "scale-label-low", GENEROSITY_LOW_LABEL));
  for (let score = 1; score <= 5; score += 1) {
    const label = el("label", "generosity-option", String(score));
    const radio = el("input") as HTMLInputElement;
    radio.type = "radio";
    radio.name = "generosity";
    radio.value = String(score);
    label.prepend(radio);
    generosity.appendChild(label);
  }
  generosity.appendChild(el("span", "scale-label-high", GENEROSITY_HIGH_LABEL));
  form.appendChild(generosity);

  const role = el("fieldset", "q-role");
  role.appendChild(el("legend", undefined, "The robot felt like a…"));
  for (const option of PERCEIVED_ROLES) {
    const label = el("label", "role-option", option);
    const radio = el("input") as HTMLInputElement;
    radio.type = "radio";
    radio.name = "perceived_role";
    radio.value = option;
    label.prepend(radio);
    role.appendChild(label);
  }
  form.appendChild(role);

  const problem = el("p", "q-problem");
  form.appendChild(problem);

  const submit = el("button", "q-submit", "Send answers") as HTMLButtonElement;
  submit.type = "submit";
  form.appendChild(submit);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const generosityValue = data.get("generosity");
    const roleValue = data.get("perceived_role");
    if (generosityValue === null) {
      problem.textContent = "Please pick a generosity score (1–5).";
      return;
    }
    if (roleValue === null) {
      problem.textContent = "Please pick one role.";
      return;
    }
    const answers: QuestionnaireAnswers = {
      seen_robot_before: data.get("seen_robot_before") !== null,
      generosity: Number(generosityValue),
      perceived_role: roleValue as QuestionnaireAnswers["perceived_role"],
    };
    const ageValue = (data.get("age") as string | null) ?? "";
    if (ageValue.trim() !== "") answers.age = Number(ageValue);
    const genderValue = (data.get("gender") as string | null) ?? "";
    if (genderValue.trim() !== "") answers.gender = genderValue.trim();
    handlers.onQuestionnaire(answers);
  });
  return form;
}

function renderFinished(view: ClientView, handlers: Handlers): HTMLElement {
  const screen = el("div", "screen screen-final");
  screen.appendChild(el("h2", undefined, "Final scores"));
  const list = el("ul", "final-scores");
  (view.finalScoresMilli ?? []).forEach((milli, seat) => {
    list.appendChild(
      el("li", "final-score", `${seatName(view, seat)}: ${milliToText(milli)} €`),
    );
  });
  screen.appendChild(list);
  const table = renderResultTable(view);
  if (table) screen.appendChild(table);

  if (view.questionnaireSent) {
    screen.appendChild(el("p", "q-done", "Thanks! Your answers were recorded."));
  } else {
    screen.appendChild(renderQuestionnaire(handlers));
  }
  return screen;
}

export function render(root: HTMLElement, view: ClientView, handlers: Handlers): void {
  root.textContent = "";
  root.appendChild(renderBanner(view));
  const error = renderError(view);
  if (error) root.appendChild(error);

  switch (view.phase) {
    case "connecting":
      root.appendChild(el("p", "screen screen-connecting", "Connecting…"));
      break;
    case "lobby":
      root.appendChild(renderLobby(view));
      break;
    case "decision":
      root.appendChild(renderDecision(view, handlers));
      break;
    case "reveal":
      root.appendChild(renderReveal(view));
      break;
    case "finished":
      root.appendChild(renderFinished(view, handlers));
      break;
    case "protocol_error": {
      const box = el("div", "screen screen-protocol-error");
      box.appendChild(el("h2", undefined, "Protocol error"));
      box.appendChild(el("p", "protocol-error-detail", view.protocolError ?? ""));
      box.appendChild(el("p", "hint", "Please reload and rejoin the session."));
      root.appendChild(box);
      break;
    }
    case "closed": {
      const box = el("div", "screen screen-closed");
      box.appendChild(el("h2", undefined, "Session ended"));
      root.appendChild(box);
      break;
    }
  }
}
