import { describe, expect, it } from "vitest";

import type { PersonaView, RecordView, TurnView } from "../src/api.js";
import {
  attirePayload,
  badgeLabel,
  badgeLabels,
  composerEnabled,
  describePhase,
  recordKeyLabel,
  recordRow,
  traitBars,
  turnEntries,
} from "../src/views.js";

const SUNNYBOT: PersonaView = {
  robot_id: "SunnyBot",
  motto: "Happiness is a banquet shared with friends",
  extraversion: 0.8,
  agreeableness: 0.8,
  neuroticism: 0.2,
  conscientiousness: 0.3,
  openness: 0.4,
};

describe("traitBars", () => {
  it("lists all five traits with percentage widths", () => {
    const bars = traitBars(SUNNYBOT);
    expect(bars).toHaveLength(5);
    const byName = Object.fromEntries(bars.map((bar) => [bar.name, bar]));
    expect(byName["Extraversion"].percent).toBe("80%");
    expect(byName["Neuroticism"].percent).toBe("20%");
    expect(byName["Conscientiousness"].weight).toBe(0.3);
  });
});

describe("badgeLabel", () => {
  it("adds the interesting slot per kind", () => {
    expect(badgeLabel({ kind: "GreetWithName", slots: { name: "benedetta" } })).toBe(
      "GreetWithName: benedetta",
    );
    expect(badgeLabel({ kind: "ReferenceEmotion", slots: { valence: "positive" } })).toBe(
      "ReferenceEmotion: positive",
    );
    expect(
      badgeLabel({ kind: "CommentAttire", slots: { aspect: "color", value: "blue" } }),
    ).toBe("CommentAttire: blue");
    expect(
      badgeLabel({ kind: "Recommend", slots: { film: "interstellar", reason: "genre_match" } }),
    ).toBe("Recommend: interstellar");
  });

  it("falls back to the bare kind", () => {
    expect(badgeLabel({ kind: "Farewell", slots: {} })).toBe("Farewell");
    expect(badgeLabel({ kind: "GreetWithName", slots: {} })).toBe("GreetWithName");
  });
});

describe("recordRow", () => {
  const base: RecordView = {
    family: "personal",
    param: "profession",
    value: "student",
    probability: 0.4,
    status: "forgotten",
    observed_valence: null,
    session_observed: 1,
  };

  it("labels parameterized families with their parameter", () => {
    expect(recordKeyLabel(base)).toBe("personal(profession)");
    expect(recordKeyLabel({ family: "username", param: null })).toBe("username");
  });

  it("maps status to a css class and formats the probability", () => {
    const row = recordRow(base);
    expect(row.statusClass).toBe("status-forgotten");
    expect(row.probability).toBe("0.40");
    const remembered = recordRow({ ...base, status: "remembered", probability: 1 });
    expect(remembered.statusClass).toBe("status-remembered");
    expect(remembered.probability).toBe("1.00");
  });
});

describe("turnEntries", () => {
  it("keeps badges on robot turns only", () => {
    const turns: TurnView[] = [
      {
        turn: 1,
        speaker: "robot",
        text: "hello",
        acts: [{ kind: "GreetAnonymous", slots: {} }],
        side_channel: null,
      },
      { turn: 2, speaker: "user", text: "hi", acts: [], side_channel: null },
    ];
    const entries = turnEntries(turns);
    expect(entries[0].badges).toEqual(["GreetAnonymous"]);
    expect(entries[1].badges).toEqual([]);
  });
});

describe("composer state", () => {
  it("disables the composer when the session is closed or absent", () => {
    expect(composerEnabled("slot_filling")).toBe(true);
    expect(composerEnabled("recall_talk")).toBe(true);
    expect(composerEnabled("closed")).toBe(false);
    expect(composerEnabled(null)).toBe(false);
  });

  it("describes phases in plain words", () => {
    expect(describePhase("slot_filling")).toBe("getting to know you");
    expect(describePhase("closed")).toBe("session closed");
  });
});

describe("attirePayload", () => {
  it("normalizes entries and drops blanks", () => {
    expect(
      attirePayload([
        { aspect: " Color ", value: " Blue " },
        { aspect: "", value: "red" },
      ]),
    ).toEqual({ color: "blue" });
  });

  it("is undefined when nothing usable remains", () => {
    expect(attirePayload([])).toBeUndefined();
    expect(attirePayload([{ aspect: " ", value: "x" }])).toBeUndefined();
  });

  it("keeps multiple aspects", () => {
    expect(
      attirePayload([
        { aspect: "color", value: "blue" },
        { aspect: "style", value: "casual" },
      ]),
    ).toEqual({ color: "blue", style: "casual" });
  });

  it("labels badge lists in order", () => {
    expect(
      badgeLabels([
        { kind: "GreetWithName", slots: { name: "ana" } },
        { kind: "Farewell", slots: {} },
      ]),
    ).toEqual(["GreetWithName: ana", "Farewell"]);
  });
});
