/** Pure view-state logic, kept free of DOM and network so it can be unit-tested. */

/** Checkbox defaults come from the proposed combination, bit for bit. */
export function checkboxesFromProposed(proposed: string): boolean[] {
  if (!/^[01]+$/.test(proposed)) {
    throw new Error(`malformed combination ${JSON.stringify(proposed)}`);
  }
  return Array.from(proposed, (c) => c === "1");
}

export function combinationFromCheckboxes(boxes: readonly boolean[]): string {
  return boxes.map((b) => (b ? "1" : "0")).join("");
}

export function toggled(boxes: readonly boolean[], index: number): boolean[] {
  if (index < 0 || index >= boxes.length) {
    throw new Error(`label index ${index} out of range`);
  }
  return boxes.map((b, i) => (i === index ? !b : b));
}

/** Serializes submits: at most one in flight; extra calls are dropped. */
export class SubmitGuard {
  private inFlight = false;

  get busy(): boolean {
    return this.inFlight;
  }

  async run<T>(fn: () => Promise<T>): Promise<T | null> {
    if (this.inFlight) return null;
    this.inFlight = true;
    try {
      return await fn();
    } finally {
      this.inFlight = false;
    }
  }
}

/** Polyline points for an SVG chart of one metric across iterations. */
export function chartPoints(
  values: readonly number[],
  width: number,
  height: number,
): string {
  if (values.length === 0) return "";
  if (values.length === 1) return `0,${height - values[0] * height}`;
  return values
    .map((v, i) => {
      const x = (i / (values.length - 1)) * width;
      const y = height - Math.min(Math.max(v, 0), 1) * height;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
}
