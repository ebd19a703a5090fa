// Client state machine. Pure: (view, server message) -> next view.
//
// Accepts exactly the sequences the server may emit,
//   welcome -> (round_start -> acks* -> round_result)* -> game_over,
// with persona events and transient errors inside a decision phase.
// Anything out of order lands in a visible protocol_error state instead
// of a silent misrender. During a decision the view never holds any other
// seat's current-round choice; results only ever describe past rounds.

import type {
  RoundResultMsg,
  SeatInfo,
  ServerMessage,
  WireConfig,
} from "./protocol.js";

export type Phase =
  | "connecting"
  | "lobby"
  | "decision"
  | "reveal"
  | "finished"
  | "protocol_error"
  | "closed";

export interface PersonaItem {
  seat: number;
  action: string;
}

export interface ClientView {
  phase: Phase;
  mySeat: number | null;
  config: WireConfig | null;
  seats: SeatInfo[];
  round: number;
  roundOf: number;
  mySubmitted: boolean;
  submissionPending: boolean;
  lastResult: RoundResultMsg | null;
  finalScoresMilli: number[] | null;
  personaFeed: PersonaItem[];
  lastError: { code: string; message: string } | null;
  protocolError: string | null;
  questionnaireSent: boolean;
}

export function initialView(): ClientView {
  return {
    phase: "connecting",
    mySeat: null,
    config: null,
    seats: [],
    round: -1,
    roundOf: 0,
    mySubmitted: false,
    submissionPending: false,
    lastResult: null,
    finalScoresMilli: null,
    personaFeed: [],
    lastError: null,
    protocolError: null,
    questionnaireSent: false,
  };
}

// Errors that end the session for this client rather than one action.
const FATAL_ERROR_CODES = new Set([
  "session_full",
  "unknown_session",
  "sink_unavailable",
  "malformed",
]);

const PERSONA_FEED_LIMIT = 4;

function protocolError(view: ClientView, detail: string): ClientView {
  return { ...view, phase: "protocol_error", protocolError: detail };
}

export function reduce(view: ClientView, message: ServerMessage): ClientView {
  if (view.phase === "protocol_error" || view.phase === "closed") {
    return view;
  }
  switch (message.type) {
    case "welcome": {
      if (view.phase !== "connecting") {
        return protocolError(view, "welcome arrived twice");
      }
      return {
        ...view,
        phase: "lobby",
        mySeat: message.player_id,
        config: message.config,
        seats: message.seats,
        roundOf: message.config.num_rounds,
      };
    }
    case "round_start": {
      const expected = view.round + 1;
      if (view.phase === "lobby" || view.phase === "reveal") {
        if (message.round !== expected) {
          return protocolError(
            view,
            `round_start for round ${message.round}, expected ${expected}`,
          );
        }
        return {
          ...view,
          phase: "decision",
          round: message.round,
          roundOf: message.round_of,
          mySubmitted: false,
          submissionPending: false,
          personaFeed: [],
          lastError: null,
        };
      }
      return protocolError(view, `round_start during ${view.phase}`);
    }
    case "contribution_ack": {
      if (view.phase !== "decision" || message.round !== view.round) {
        return protocolError(view, "stray contribution_ack");
      }
      return { ...view, mySubmitted: true, submissionPending: false };
    }
    case "round_result": {
      // Legal whether or not we submitted: a timeout fills missing choices.
      if (view.phase !== "decision" || message.round !== view.round) {
        return protocolError(view, `round_result during ${view.phase}`);
      }
      return { ...view, phase: "reveal", lastResult: message };
    }
    case "persona_event": {
      if (view.phase !== "decision") {
        return protocolError(view, `persona_event during ${view.phase}`);
      }
      const feed = [
        ...view.personaFeed,
        { seat: message.player_id, action: message.action_id },
      ];
      return { ...view, personaFeed: feed.slice(-PERSONA_FEED_LIMIT) };
    }
    case "game_over": {
      if (view.phase !== "reveal" || view.round !== view.roundOf - 1) {
        return protocolError(view, `game_over during ${view.phase}`);
      }
      return { ...view, phase: "finished", finalScoresMilli: message.final_scores_milli };
    }
    case "error": {
      if (FATAL_ERROR_CODES.has(message.code)) {
        return {
          ...view,
          phase: "closed",
          lastError: { code: message.code, message: message.message },
        };
      }
      // Transient rejection: show it verbatim and unlock retry if we were
      // waiting on an ack that will never come.
      return {
        ...view,
        submissionPending: false,
        lastError: { code: message.code, message: message.message },
      };
    }
  }
}

/** The decision screen accepts a click only when nothing is in flight. */
export function canSubmit(view: ClientView): boolean {
  return (
    view.phase === "decision" && !view.mySubmitted && !view.submissionPending
  );
}

export function markSubmissionSent(view: ClientView): ClientView {
  return { ...view, submissionPending: true, lastError: null };
}

export function markQuestionnaireSent(view: ClientView): ClientView {
  return { ...view, questionnaireSent: true };
}

export function markDisconnected(view: ClientView): ClientView {
  if (view.phase === "finished" || view.phase === "protocol_error") {
    return view;
  }
  return {
    ...view,
    phase: "closed",
    lastError: view.lastError ?? {
      code: "disconnected",
      message: "connection to the server was lost",
    },
  };
}
