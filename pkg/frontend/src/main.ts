import { ApiClient, ApiError, Decision, LabelEntry } from "./api.js";
import {
  barFraction,
  heatColor,
  labelProblem,
  PadGrid,
  Stroke,
  VersionTracker,
} from "./model.js";

const api = new ApiClient("");
const tracker = new VersionTracker();
const POLL_MS = 2000;

let pad: PadGrid;
let stroke = new Stroke();
let mouseDown = false;
let shownHeatmapLabel: string | null = null;

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

function flash(message: string, kind: "error" | "info" = "error"): void {
  const banner = $("banner");
  banner.textContent = message;
  banner.className = `banner ${kind}`;
  banner.hidden = false;
  window.setTimeout(() => {
    banner.hidden = true;
  }, 4000);
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    return await work();
  } catch (err) {
    if (err instanceof ApiError) flash(`${err.status}: ${err.message}`);
    else flash(String(err));
    return undefined;
  }
}

// -- drawing pad -------------------------------------------------------------

function buildPad(w: number, h: number): void {
  pad = new PadGrid({ w, h });
  const board = $("board");
  board.innerHTML = "";
  board.style.gridTemplateColumns = `repeat(${w}, var(--cell))`;
  for (let y = 0; y < h; y++) {
    for (let x = 0; x < w; x++) {
      const cell = document.createElement("div");
      cell.className = "cell";
      cell.dataset.x = String(x);
      cell.dataset.y = String(y);
      cell.addEventListener("mousedown", (ev) => {
        ev.preventDefault();
        mouseDown = true;
        paint(cell, x, y);
      });
      cell.addEventListener("mouseover", () => {
        if (mouseDown) paint(cell, x, y);
      });
      board.appendChild(cell);
    }
  }
  refreshBoard();
}

function paint(cell: HTMLElement, x: number, y: number): void {
  stroke.visit(pad, x, y);
  cell.classList.toggle("ink", pad.get(x, y) === 1);
  refreshButtons();
}

function refreshBoard(): void {
  const board = $("board");
  for (const el of Array.from(board.children) as HTMLElement[]) {
    const x = Number(el.dataset.x);
    const y = Number(el.dataset.y);
    el.classList.toggle("ink", pad.get(x, y) === 1);
  }
  refreshButtons();
}

function refreshButtons(): void {
  ($("classify") as HTMLButtonElement).disabled = pad.isEmpty();
  ($("teach") as HTMLButtonElement).disabled = pad.isEmpty();
}

// -- results -----------------------------------------------------------------

function renderDecision(decision: Decision | null): void {
  const verdict = $("verdict");
  const bars = $("bars");
  bars.innerHTML = "";
  if (decision === null) {
    verdict.textContent = "";
    verdict.className = "verdict";
    return;
  }
  if (decision.kind === "empty_kb") {
    verdict.textContent = "no labels taught yet";
    verdict.className = "verdict unknown";
  } else if (decision.kind === "match" && decision.best) {
    verdict.textContent = `match: ${decision.best.label} (q=${decision.best.q_display})`;
    verdict.className = "verdict match";
  } else if (decision.best) {
    verdict.textContent = `unknown (best ${decision.best.label} q=${decision.best.q_display})`;
    verdict.className = "verdict unknown";
  }
  for (const score of decision.scores) {
    const row = document.createElement("div");
    row.className = "bar-row";
    row.title = `psi=${score.psi} mu=${score.mu}`;
    const name = document.createElement("span");
    name.className = "bar-label";
    name.textContent = score.label;
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    fill.style.width = `${barFraction(score.q_num, score.q_den) * 100}%`;
    track.appendChild(fill);
    const value = document.createElement("span");
    value.className = "bar-value";
    value.textContent = score.q_display;
    row.append(name, track, value);
    bars.appendChild(row);
  }
  if (decision.unscorable.length > 0) {
    const note = document.createElement("div");
    note.className = "note";
    note.textContent = `unscorable (mu=0): ${decision.unscorable.join(", ")}`;
    bars.appendChild(note);
  }
}

async function classifyNow(): Promise<void> {
  if (pad.isEmpty()) return;
  const threshold = ($("threshold") as HTMLInputElement).value;
  const decision = await guard(() => api.classify(pad.toRows(), threshold));
  if (decision) renderDecision(decision);
}

// -- labels and heatmap --------------------------------------------------------

function renderLabels(entries: LabelEntry[]): void {
  const list = $("labels");
  list.innerHTML = "";
  if (entries.length === 0) {
    const empty = document.createElement("li");
    empty.className = "note";
    empty.textContent = "no labels taught yet";
    list.appendChild(empty);
    return;
  }
  for (const entry of entries) {
    const item = document.createElement("li");
    const name = document.createElement("button");
    name.className = "label-name";
    name.textContent = `${entry.label} (${entry.teach_count})`;
    name.title = "show weight heatmap";
    name.addEventListener("click", () => void showHeatmap(entry.label));
    const forget = document.createElement("button");
    forget.className = "label-forget";
    forget.textContent = "forget";
    forget.addEventListener("click", () => void forgetLabel(entry.label));
    item.append(name, forget);
    list.appendChild(item);
  }
}

async function refreshLabels(): Promise<void> {
  const entries = await guard(() => api.labels());
  if (entries) renderLabels(entries);
}

async function showHeatmap(label: string): Promise<void> {
  const doc = await guard(() => api.weights(label));
  if (!doc) return;
  shownHeatmapLabel = label;
  $("heatmap-title").textContent =
    `weights for ${doc.label} after ${doc.teach_count} teachings`;
  const grid = $("heatmap");
  grid.innerHTML = "";
  grid.style.gridTemplateColumns = `repeat(${doc.rows[0]?.length ?? 0}, var(--cell))`;
  for (const row of doc.rows) {
    for (const weight of row) {
      const cell = document.createElement("div");
      cell.className = "cell heat";
      cell.style.backgroundColor = heatColor(weight, doc.teach_count);
      cell.title = String(weight);
      grid.appendChild(cell);
    }
  }
}

async function forgetLabel(label: string): Promise<void> {
  const result = await guard(() => api.forget(label));
  if (!result) return;
  tracker.absorb(result.version);
  if (shownHeatmapLabel === label) {
    shownHeatmapLabel = null;
    $("heatmap").innerHTML = "";
    $("heatmap-title").textContent = "";
  }
  await refreshLabels();
}

async function teachNow(): Promise<void> {
  const input = $("label-input") as HTMLInputElement;
  const label = input.value.trim();
  const problem = labelProblem(label);
  if (problem) {
    flash(problem);
    return;
  }
  const result = await guard(() => api.teach(label, pad.toRows()));
  if (!result) return;
  tracker.absorb(result.version);
  flash(`taught ${result.label}, count ${result.teach_count}`, "info");
  await refreshLabels();
  if (shownHeatmapLabel === label) await showHeatmap(label);
  // Re-classify immediately so the supervisor watches Q move toward 1.
  await classifyNow();
}

// -- version polling -----------------------------------------------------------

async function poll(): Promise<void> {
  try {
    const meta = await api.meta();
    $("meta").textContent =
      `grid ${meta.dims.w}×${meta.dims.h}, ${meta.label_count} labels, v${meta.version}`;
    if (meta.dims.w !== pad.dims.w || meta.dims.h !== pad.dims.h) {
      buildPad(meta.dims.w, meta.dims.h);
      renderDecision(null);
      await refreshLabels();
    } else if (tracker.isForeign(meta.version)) {
      renderDecision(null);
      await refreshLabels();
      flash("knowledge base changed elsewhere; refreshed", "info");
    }
    tracker.absorb(meta.version);
  } catch {
    // Transient poll failures are not worth a banner.
  }
}

// -- boot ----------------------------------------------------------------------

async function boot(): Promise<void> {
  document.addEventListener("mouseup", () => {
    mouseDown = false;
    stroke.finish();
  });
  $("clear").addEventListener("click", () => {
    pad.clear();
    refreshBoard();
  });
  $("invert").addEventListener("click", () => {
    pad.invert();
    refreshBoard();
  });
  $("classify").addEventListener("click", () => void classifyNow());
  $("teach").addEventListener("click", () => void teachNow());
  $("threshold").addEventListener("input", () => {
    $("threshold-value").textContent = ($("threshold") as HTMLInputElement).value;
  });

  const meta = await guard(() => api.meta());
  if (!meta) {
    flash("cannot reach the recognition service");
    return;
  }
  tracker.absorb(meta.version);
  $("meta").textContent =
    `grid ${meta.dims.w}×${meta.dims.h}, ${meta.label_count} labels, v${meta.version}`;
  buildPad(meta.dims.w, meta.dims.h);
  await refreshLabels();
  window.setInterval(() => void poll(), POLL_MS);
}

void boot();
