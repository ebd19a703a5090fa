// Wire protocol: one JSON object per text frame, type-tagged.
// Contributions travel as integer cents, computed quantities as integer
// milli-euros; the client never does floating-point money math.

export interface WireConfig {
  num_players: number;
  num_rounds: number;
  endowment_cents: number;
  allowed_cents: number[];
  multiplier: [number, number];
}

export interface SeatInfo {
  player_id: number;
  name: string;
  is_bot: boolean;
  connected: boolean;
}

export interface RoundResultMsg {
  type: "round_result";
  round: number;
  contributions_cents: number[];
  pool_milli: number;
  multiplied_milli: number;
  share_milli: number;
  payoffs_milli: number[];
  cumulative_milli: number[];
}

export type ServerMessage =
  | { type: "welcome"; player_id: number; config: WireConfig; seats: SeatInfo[] }
  | { type: "round_start"; round: number; round_of: number }
  | { type: "contribution_ack"; round: number }
  | RoundResultMsg
  | { type: "persona_event"; player_id: number; action_id: string }
  | { type: "game_over"; final_scores_milli: number[] }
  | { type: "error"; code: string; message: string };

export const PERCEIVED_ROLES = [
  "friend",
  "neighbor",
  "classmate",
  "stranger",
  "teacher",
  "relative",
] as const;

export type PerceivedRole = (typeof PERCEIVED_ROLES)[number];

export interface QuestionnaireAnswers {
  seen_robot_before: boolean;
  generosity: number;
  perceived_role: PerceivedRole;
  age?: number;
  gender?: string;
}

const isInt = (v: unknown): v is number => typeof v === "number" && Number.isInteger(v);
const isIntArray = (v: unknown): v is number[] => Array.isArray(v) && v.every(isInt);

function isConfig(v: unknown): v is WireConfig {
  if (typeof v !== "object" || v === null) return false;
  const c = v as Record<string, unknown>;
  return (
    isInt(c.num_players) &&
    isInt(c.num_rounds) &&
    isInt(c.endowment_cents) &&
    isIntArray(c.allowed_cents) &&
    isIntArray(c.multiplier) &&
    (c.multiplier as number[]).length === 2
  );
}

function isSeats(v: unknown): v is SeatInfo[] {
  return (
    Array.isArray(v) &&
    v.every((s) => {
      if (typeof s !== "object" || s === null) return false;
      const seat = s as Record<string, unknown>;
      return (
        isInt(seat.player_id) &&
        typeof seat.name === "string" &&
        typeof seat.is_bot === "boolean" &&
        typeof seat.connected === "boolean"
      );
    })
  );
}

/** Strictly parse one inbound frame; null marks a protocol violation. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const m = data as Record<string, unknown>;
  switch (m.type) {
    case "welcome":
      if (isInt(m.player_id) && isConfig(m.config) && isSeats(m.seats)) {
        return m as unknown as ServerMessage;
      }
      return null;
    case "round_start":
      return isInt(m.round) && isInt(m.round_of) ? (m as unknown as ServerMessage) : null;
    case "contribution_ack":
      return isInt(m.round) ? (m as unknown as ServerMessage) : null;
    case "round_result":
      if (
        isInt(m.round) &&
        isIntArray(m.contributions_cents) &&
        isInt(m.pool_milli) &&
        isInt(m.multiplied_milli) &&
        isInt(m.share_milli) &&
        isIntArray(m.payoffs_milli) &&
        isIntArray(m.cumulative_milli)
      ) {
        return m as unknown as ServerMessage;
      }
      return null;
    case "persona_event":
      return isInt(m.player_id) && typeof m.action_id === "string"
        ? (m as unknown as ServerMessage)
        : null;
    case "game_over":
      return isIntArray(m.final_scores_milli) ? (m as unknown as ServerMessage) : null;
    case "error":
      return typeof m.code === "string" && typeof m.message === "string"
        ? (m as unknown as ServerMessage)
        : null;
    default:
      return null;
  }
}

export function joinMessage(session: string, name: string): string {
  return JSON.stringify({ type: "join", session, name });
}

export function contributeMessage(round: number, amountCents: number): string {
  return JSON.stringify({ type: "contribute", round, amount_cents: amountCents });
}

export function questionnaireMessage(answers: QuestionnaireAnswers): string {
  return JSON.stringify({ type: "questionnaire", answers });
}
