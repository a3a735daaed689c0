// Pure view-model helpers: everything here is data-in, data-out so the
// rendering rules stay unit-testable without a DOM.

import type { ActView, PersonaView, RecordView, TurnView } from "./api.js";

export interface TraitBar {
  name: string;
  weight: number;
  percent: string;
}

const TRAIT_ORDER: Array<[keyof PersonaView & string, string]> = [
  ["openness", "Openness"],
  ["conscientiousness", "Conscientiousness"],
  ["extraversion", "Extraversion"],
  ["agreeableness", "Agreeableness"],
  ["neuroticism", "Neuroticism"],
];

export function traitBars(persona: PersonaView): TraitBar[] {
  return TRAIT_ORDER.map(([key, name]) => {
    const weight = persona[key] as number;
    return { name, weight, percent: `${Math.round(weight * 100)}%` };
  });
}

// Which slot, if any, is worth showing next to an act badge.
const BADGE_SLOT: Record<string, string> = {
  GreetWithName: "name",
  AskSlot: "slot",
  ReAsk: "slot",
  AskMotivation: "about",
  AskDetail: "about",
  CommentAttire: "value",
  ReferenceEmotion: "valence",
  Recommend: "film",
  SharedFavouriteCallout: "value",
  RecallPersonal: "param",
};

export function badgeLabel(act: ActView): string {
  const slot = BADGE_SLOT[act.kind];
  const detail = slot ? act.slots[slot] : undefined;
  return detail ? `${act.kind}: ${detail}` : act.kind;
}

export function badgeLabels(acts: ActView[]): string[] {
  return acts.map(badgeLabel);
}

export interface RecordRow {
  label: string;
  value: string;
  probability: string;
  status: string;
  statusClass: string;
}

export function recordKeyLabel(record: Pick<RecordView, "family" | "param">): string {
  return record.param ? `${record.family}(${record.param})` : record.family;
}

export function recordRow(record: RecordView): RecordRow {
  return {
    label: recordKeyLabel(record),
    value: record.value,
    probability: record.probability.toFixed(2),
    status: record.status,
    statusClass: `status-${record.status}`,
  };
}

export function recordRows(records: RecordView[]): RecordRow[] {
  return records.map(recordRow);
}

export interface TurnEntry {
  speaker: string;
  text: string;
  badges: string[];
}

export function turnEntries(turns: TurnView[]): TurnEntry[] {
  return turns.map((turn) => ({
    speaker: turn.speaker,
    text: turn.text,
    badges: turn.speaker === "robot" ? badgeLabels(turn.acts) : [],
  }));
}

export function describePhase(phase: string): string {
  switch (phase) {
    case "slot_filling":
      return "getting to know you";
    case "recall_talk":
      return "catching up";
    case "closed":
      return "session closed";
    default:
      return phase.replace("_", " ");
  }
}

export function composerEnabled(phase: string | null): boolean {
  return phase !== null && phase !== "closed";
}

export interface AttireEntry {
  aspect: string;
  value: string;
}

export function attirePayload(entries: AttireEntry[]): Record<string, string> | undefined {
  const payload: Record<string, string> = {};
  for (const entry of entries) {
    const aspect = entry.aspect.trim().toLowerCase();
    const value = entry.value.trim().toLowerCase();
    if (aspect && value) {
      payload[aspect] = value;
    }
  }
  return Object.keys(payload).length ? payload : undefined;
}
