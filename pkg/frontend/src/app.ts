// Socket glue: join form, one WebSocket, message-order processing.
// All state transitions run through the pure reducer in state.ts; this
// file only wires DOM events to outbound frames and inbound frames to
// re-renders.

import { render, type Handlers } from "./dom.js";
import {
  contributeMessage,
  joinMessage,
  parseServerMessage,
  questionnaireMessage,
  type QuestionnaireAnswers,
} from "./protocol.js";
import {
  canSubmit,
  initialView,
  markDisconnected,
  markQuestionnaireSent,
  markSubmissionSent,
  reduce,
  type ClientView,
} from "./state.js";

/** The subset of the WebSocket API the app uses; injectable for tests. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((event?: unknown) => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: ((event?: unknown) => void) | null;
}

export interface AppOptions {
  createSocket?: (url: string) => SocketLike;
  serverUrl?: string;
}

export interface App {
  readonly view: ClientView;
  processFrame(raw: string): void;
}

function defaultSocketFactory(url: string): SocketLike {
  return new WebSocket(url) as unknown as SocketLike;
}

function defaultServerUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}`;
}

class GameClient implements App {
  view: ClientView = initialView();

  private socket: SocketLike;

  constructor(
    private root: HTMLElement,
    url: string,
    session: string,
    name: string,
    createSocket: (url: string) => SocketLike,
  ) {
    this.socket = createSocket(url);
    this.socket.onopen = () => {
      this.socket.send(joinMessage(session, name));
      this.render();
    };
    this.socket.onmessage = (event) => {
      this.processFrame(String(event.data));
    };
    this.socket.onclose = () => {
      this.view = markDisconnected(this.view);
      this.render();
    };
  }

  processFrame(raw: string): void {
    const message = parseServerMessage(raw);
    if (message === null) {
      this.view = {
        ...this.view,
        phase: "protocol_error",
        protocolError: "unparseable frame from the server",
      };
    } else {
      this.view = reduce(this.view, message);
    }
    this.render();
  }

  private handlers: Handlers = {
    onContribute: (amountCents: number) => {
      if (!canSubmit(this.view)) return;
      this.view = markSubmissionSent(this.view);
      this.socket.send(contributeMessage(this.view.round, amountCents));
      this.render();
    },
    onQuestionnaire: (answers: QuestionnaireAnswers) => {
      if (this.view.questionnaireSent) return;
      this.view = markQuestionnaireSent(this.view);
      this.socket.send(questionnaireMessage(answers));
      this.render();
    },
  };

  render(): void {
    render(this.root, this.view, this.handlers);
  }
}

/** Join a session directly (used by tests and deep links). */
export function joinSession(
  root: HTMLElement,
  session: string,
  name: string,
  options: AppOptions = {},
): App {
  const createSocket = options.createSocket ?? defaultSocketFactory;
  const url = options.serverUrl ?? defaultServerUrl();
  const client = new GameClient(root, url, session, name, createSocket);
  client.render();
  return client;
}

/** Entry point: a join form, then the game client. */
export function startApp(root: HTMLElement, options: AppOptions = {}): void {
  root.textContent = "";
  const form = document.createElement("form");
  form.className = "join-form";

  const sessionLabel = document.createElement("label");
  sessionLabel.textContent = "Session code ";
  const sessionInput = document.createElement("input");
  sessionInput.name = "session";
  sessionInput.required = true;
  sessionLabel.appendChild(sessionInput);

  const nameLabel = document.createElement("label");
  nameLabel.textContent = "Your name ";
  const nameInput = document.createElement("input");
  nameInput.name = "name";
  nameLabel.appendChild(nameInput);

  const button = document.createElement("button");
  button.type = "submit";
  button.textContent = "Join";

  form.append(sessionLabel, nameLabel, button);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const session = sessionInput.value.trim();
    if (!session) return;
    joinSession(root, session, nameInput.value.trim(), options);
  });
  root.appendChild(form);
}
