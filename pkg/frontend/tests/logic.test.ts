import { describe, expect, it } from "vitest";

import {
  chartPoints,
  checkboxesFromProposed,
  combinationFromCheckboxes,
  SubmitGuard,
  toggled,
} from "../src/logic.js";

describe("checkbox state", () => {
  it("initializes exactly from the proposed combination", () => {
    expect(checkboxesFromProposed("0101")).toEqual([false, true, false, true]);
    expect(checkboxesFromProposed("1000")).toEqual([true, false, false, false]);
  });

  it("round-trips through serialization", () => {
    for (const combo of ["0000", "0101", "1111", "0110"]) {
      expect(combinationFromCheckboxes(checkboxesFromProposed(combo))).toBe(combo);
    }
  });

  it("rejects malformed combinations", () => {
    expect(() => checkboxesFromProposed("01x1")).toThrow();
    expect(() => checkboxesFromProposed("")).toThrow();
  });

  it("toggles a single label immutably", () => {
    const boxes = checkboxesFromProposed("0101");
    const after = toggled(boxes, 0);
    expect(combinationFromCheckboxes(after)).toBe("1101");
    expect(combinationFromCheckboxes(boxes)).toBe("0101");
    expect(() => toggled(boxes, 4)).toThrow();
  });
});

describe("submit guard", () => {
  it("drops calls while one is in flight", async () => {
    const guard = new SubmitGuard();
    let resolveFirst!: (v: string) => void;
    const first = guard.run(
      () => new Promise<string>((resolve) => (resolveFirst = resolve)),
    );
    const second = await guard.run(async () => "second");
    expect(second).toBeNull();
    resolveFirst("first");
    expect(await first).toBe("first");
    expect(await guard.run(async () => "third")).toBe("third");
  });
});

describe("chart points", () => {
  it("spans the full width and clamps to [0, 1]", () => {
    const points = chartPoints([0, 0.5, 2], 100, 50);
    expect(points).toBe("0.0,50.0 50.0,25.0 100.0,0.0");
  });

  it("handles empty and single-point series", () => {
    expect(chartPoints([], 100, 50)).toBe("");
    expect(chartPoints([1], 100, 50)).toBe("0,0");
  });
});
