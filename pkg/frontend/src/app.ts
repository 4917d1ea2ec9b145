/** Single-page annotation review client.
 *
 * Flow: fetch the next task, show per-label checkboxes pre-checked from the
 * proposed combination, let the reviewer confirm (Enter) or toggle labels
 * (number keys / clicks) and submit. An empty queue shows the progress
 * dashboard with an advance button; network failures show a retry banner.
 */

import { ApiError, Client, LabelsView, Progress, TaskView } from "./api.js";
import {
  chartPoints,
  checkboxesFromProposed,
  combinationFromCheckboxes,
  SubmitGuard,
  toggled,
} from "./logic.js";

const client = new Client();
const guard = new SubmitGuard();

interface ViewState {
  task: TaskView | null;
  boxes: boolean[];
  labels: LabelsView | null;
  confirmed: number;
  corrected: number;
}

const state: ViewState = {
  task: null,
  boxes: [],
  labels: null,
  confirmed: 0,
  corrected: 0,
};

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function showBanner(message: string, retry: () => void): void {
  const banner = el("banner");
  banner.textContent = "";
  banner.append(message + " ");
  const button = document.createElement("button");
  button.textContent = "Retry";
  button.onclick = () => {
    banner.hidden = true;
    retry();
  };
  banner.append(button);
  banner.hidden = false;
}

function renderTask(task: TaskView): void {
  state.task = task;
  state.boxes = checkboxesFromProposed(task.proposed);
  el("progress-view").hidden = true;
  const view = el("task-view");
  view.hidden = false;
  el("task-id").textContent =
    `${task.sample_id} — iteration ${task.iteration}`;
  const list = el("label-list");
  list.textContent = "";
  task.labels.forEach((name, i) => {
    const row = document.createElement("label");
    row.className = "label-row";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = state.boxes[i];
    box.onchange = () => {
      state.boxes = toggled(state.boxes, i);
    };
    const prob = task.probabilities[i];
    row.append(box, ` ${i + 1}. ${name} `, badge(prob));
    list.append(row);
  });
  el("tally").textContent =
    `confirmed ${state.confirmed} · corrected ${state.corrected}`;
}

function badge(prob: number): HTMLElement {
  const span = document.createElement("span");
  span.className = "prob";
  span.textContent = prob.toFixed(2);
  return span;
}

async function renderProgress(): Promise<void> {
  const progress = await client.getProgress();
  state.task = null;
  el("task-view").hidden = true;
  const view = el("progress-view");
  view.hidden = false;
  el("progress-summary").textContent =
    `iteration ${progress.iteration}/${progress.max_iterations} · ` +
    `labeled ${(progress.labeled_fraction * 100).toFixed(1)}% ` +
    `(${progress.labeled_count} samples) · ` +
    `confirmed ${progress.confirmed_total} · corrected ${progress.corrected_total}`;
  drawChart(progress);
  const button = el("advance") as HTMLButtonElement;
  button.disabled = progress.completed;
  button.textContent = progress.completed
    ? "Run completed"
    : "Start next iteration";
}

function drawChart(progress: Progress): void {
  const width = 320;
  const height = 120;
  const accuracy = progress.series.map((r) => r.macro_accuracy);
  const corrected = progress.series.map((r) => r.corrected_fraction);
  el("chart").innerHTML =
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">` +
    `<polyline fill="none" stroke="#2a7" stroke-width="2" ` +
    `points="${chartPoints(accuracy, width, height)}"/>` +
    `<polyline fill="none" stroke="#c44" stroke-width="2" ` +
    `points="${chartPoints(corrected, width, height)}"/></svg>` +
    `<div class="legend">macro accuracy (green) · corrected fraction (red)</div>`;
}

async function loadNext(): Promise<void> {
  try {
    const task = await client.fetchNext();
    if (task === null) {
      await renderProgress();
    } else {
      renderTask(task);
    }
  } catch (err) {
    showBanner(`Could not reach the service: ${String(err)}`, () => {
      void loadNext();
    });
  }
}

async function submit(): Promise<void> {
  const task = state.task;
  if (!task) return;
  const final = combinationFromCheckboxes(state.boxes);
  const ack = await guard.run(() => client.submitDecision(task.sample_id, final));
  if (ack === null) return; // a submit was already in flight
  if (ack.changed) {
    state.corrected += 1;
  } else {
    state.confirmed += 1;
  }
  await loadNext();
}

async function onSubmitClick(): Promise<void> {
  try {
    await submit();
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      // finalized elsewhere: refresh to the next task
      await loadNext();
      return;
    }
    showBanner(`Submit failed: ${String(err)}`, () => {
      void onSubmitClick();
    });
  }
}

async function onAdvance(): Promise<void> {
  try {
    await client.advance();
    await loadNext();
  } catch (err) {
    showBanner(`Could not advance: ${String(err)}`, () => {
      void onAdvance();
    });
  }
}

function onKey(event: KeyboardEvent): void {
  if (!state.task) return;
  if (event.key === "Enter") {
    void onSubmitClick();
    return;
  }
  const index = Number.parseInt(event.key, 10) - 1;
  if (Number.isInteger(index) && index >= 0 && index < state.boxes.length) {
    state.boxes = toggled(state.boxes, index);
    const inputs = el("label-list").querySelectorAll("input");
    (inputs[index] as HTMLInputElement).checked = state.boxes[index];
  }
}

export function start(): void {
  el("submit").onclick = () => void onSubmitClick();
  el("advance").onclick = () => void onAdvance();
  document.addEventListener("keydown", onKey);
  void loadNext();
}

if (typeof document !== "undefined" && document.getElementById("task-view")) {
  start();
}
