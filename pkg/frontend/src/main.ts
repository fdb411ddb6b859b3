/**
 * Application wiring: palette and grid interactions on the left of the
 * loop, task submission and result rendering on the right, and the
 * descent dashboard with its one event subscription per open run.
 */

import { ApiClient, ApiError, pollUntilSettled } from "./api.js";
import {
  ComposerDocument,
  Lane,
  PALETTE,
  PaletteEntry,
  gateFromDialog,
  loadDocument,
  newDocument,
  placeGate,
  removeGate,
  serializeDocument,
} from "./composer.js";
import { EventLog } from "./events.js";
import {
  MatrixView,
  el,
  renderChart,
  renderComposerGrid,
  renderPulseStrip,
  renderResultPanel,
  renderStatusChip,
} from "./render.js";
import { errorLine } from "./resultview.js";
import { chartGeometry, liveSeries, objectiveSeries, selectChartSeries, iterationsOf } from "./vqe.js";
import { CircuitResult, RecordPayload, radToDeg } from "./wire.js";

const apiBase = new URLSearchParams(location.search).get("api") ?? "";
const client = new ApiClient(apiBase);

interface VqeState {
  recordId: string | null;
  log: EventLog;
  subscribedTo: string | null;
  sessionState: string;
  mitigationOn: boolean;
  finished: RecordPayload | null;
  stored: RecordPayload[];
}

const state = {
  doc: newDocument("untitled") as ComposerDocument,
  armed: null as PaletteEntry | null,
  matrixView: "heat" as MatrixView,
  hint: "",
  mode: "gate-noise",
  vqe: {
    recordId: null,
    log: new EventLog(),
    subscribedTo: null,
    sessionState: "idle",
    mitigationOn: false,
    finished: null,
    stored: [],
  } as VqeState,
};

const app = document.getElementById("app") as HTMLElement;
const composerHost = el("section", "panel");
const resultHost = el("section", "panel");
const vqeHost = el("section", "panel");
app.append(composerHost, resultHost, vqeHost);

function setHint(text: string): void {
  state.hint = text;
  drawComposer();
}

async function askNumber(label: string, initial: string): Promise<number | null> {
  const answer = window.prompt(label, initial);
  if (answer === null) {
    return null;
  }
  const value = Number(answer);
  return Number.isFinite(value) ? value : null;
}

async function handleDrop(column: number, lane: Lane): Promise<void> {
  const entry = state.armed;
  if (!entry) {
    setHint("pick a gate from the palette first");
    return;
  }
  let angleDeg: number | undefined;
  let durationS: number | undefined;
  if (entry.needsAngle) {
    const angle = await askNumber(`${entry.kind} angle in degrees`, "90");
    if (angle === null) {
      return;
    }
    angleDeg = angle;
  }
  if (entry.needsDuration) {
    const duration = await askNumber("delay in seconds", "0.002");
    if (duration === null) {
      return;
    }
    durationS = duration;
  }
  let gate;
  try {
    gate = gateFromDialog(entry.kind, angleDeg, durationS);
  } catch (err) {
    setHint((err as Error).message);
    return;
  }
  const placed = placeGate(state.doc, column, lane, gate);
  if (!placed.ok) {
    setHint(placed.hint);
    return;
  }
  state.doc = placed.doc;
  setHint("");
}

function handleRemove(column: number, lane: Lane): void {
  state.doc = removeGate(state.doc, column, lane);
  drawComposer();
}

function drawComposer(): void {
  composerHost.replaceChildren();
  composerHost.appendChild(el("h2", undefined, "Composer"));

  const nameRow = el("div", "row");
  const nameInput = el("input") as HTMLInputElement;
  nameInput.value = state.doc.name;
  nameInput.addEventListener("change", () => {
    state.doc = { ...state.doc, name: nameInput.value || "untitled" };
    drawComposer();
  });
  nameRow.append(el("span", "field-label", "circuit name"), nameInput);
  composerHost.appendChild(nameRow);

  const palette = el("div", "palette");
  for (const entry of PALETTE) {
    const button = el("button", "palette-gate", entry.label);
    button.draggable = true;
    if (state.armed?.kind === entry.kind) {
      button.classList.add("armed");
    }
    const arm = () => {
      state.armed = entry;
      drawComposer();
    };
    button.addEventListener("click", arm);
    button.addEventListener("dragstart", arm);
    palette.appendChild(button);
  }
  composerHost.appendChild(palette);

  composerHost.appendChild(
    renderComposerGrid(state.doc, { onDrop: handleDrop, onRemove: handleRemove }),
  );
  if (state.hint) {
    composerHost.appendChild(el("div", "hint", state.hint));
  }

  const circuit = serializeDocument(state.doc);
  const preview = el("pre", "serial-preview", circuit);
  composerHost.appendChild(preview);

  const loadRow = el("div", "row");
  const loadButton = el("button", undefined, "load JSON");
  loadButton.addEventListener("click", async () => {
    const text = window.prompt("paste circuit JSON", circuit);
    if (text === null) {
      return;
    }
    try {
      state.doc = loadDocument(text);
      setHint("");
    } catch (err) {
      setHint((err as Error).message);
    }
  });
  loadRow.appendChild(loadButton);

  const modeSelect = el("select") as HTMLSelectElement;
  for (const mode of ["ideal", "gate-noise", "pulse"]) {
    const option = el("option", undefined, mode) as HTMLOptionElement;
    option.value = mode;
    modeSelect.appendChild(option);
  }
  modeSelect.value = state.mode;
  modeSelect.addEventListener("change", () => {
    state.mode = modeSelect.value;
  });

  const runButton = el("button", "primary", "Run");
  runButton.addEventListener("click", () => submitCircuit(state.mode));
  const simulateButton = el("button", undefined, "Simulate");
  simulateButton.addEventListener("click", () => submitCircuit("ideal"));
  loadRow.append(modeSelect, runButton, simulateButton);
  composerHost.appendChild(loadRow);

  composerHost.appendChild(renderPulseStrip(JSON.parse(circuit)));
}

async function submitCircuit(mode: string): Promise<void> {
  resultHost.replaceChildren(el("h2", undefined, "Result"), el("div", "chip wait", "submitting"));
  try {
    const record = await client.submitTask({
      kind: "circuit",
      params: { circuit: JSON.parse(serializeDocument(state.doc)) },
      mode,
    });
    const settled = await pollUntilSettled(client, record.id, (current) => {
      resultHost.replaceChildren(
        el("h2", undefined, "Result"),
        el("span", "record-id", `record ${current.id.slice(0, 8)}`),
        renderStatusChip(current),
      );
    });
    drawResult(settled);
  } catch (err) {
    const detail = err instanceof ApiError ? err.detail : String(err);
    resultHost.replaceChildren(el("h2", undefined, "Result"), el("div", "hint", detail));
  }
}

function drawResult(record: RecordPayload): void {
  resultHost.replaceChildren();
  resultHost.appendChild(el("h2", undefined, "Result"));
  resultHost.appendChild(el("span", "record-id", `record ${record.id.slice(0, 8)}`));
  resultHost.appendChild(renderStatusChip(record));
  if (record.status === "failed") {
    resultHost.appendChild(el("div", "hint", errorLine(record.id, record.error ?? "")));
    return;
  }
  if (!record.result) {
    return;
  }
  const toggle = el("button", undefined, state.matrixView === "heat" ? "bars" : "heatmap");
  toggle.addEventListener("click", () => {
    state.matrixView = state.matrixView === "heat" ? "bars" : "heat";
    drawResult(record);
  });
  resultHost.appendChild(toggle);
  resultHost.appendChild(
    renderResultPanel(record.result as unknown as CircuitResult, state.matrixView),
  );
}

function drawVqe(): void {
  vqeHost.replaceChildren();
  vqeHost.appendChild(el("h2", undefined, "Ground-state search"));

  const controls = el("div", "row");
  const modeSelect = el("select") as HTMLSelectElement;
  for (const mode of ["ideal", "gate-noise", "pulse"]) {
    const option = el("option", undefined, mode) as HTMLOptionElement;
    option.value = mode;
    modeSelect.appendChild(option);
  }
  modeSelect.value = "gate-noise";

  const newButton = el("button", "primary", "new run");
  newButton.addEventListener("click", () => createRun(modeSelect.value));
  const startButton = el("button", undefined, "start");
  startButton.addEventListener("click", () => control("start"));
  const pauseButton = el("button", undefined, "pause");
  pauseButton.addEventListener("click", () => control("pause"));
  const resumeButton = el("button", undefined, "resume");
  resumeButton.addEventListener("click", () => control("resume"));
  controls.append(modeSelect, newButton, startButton, pauseButton, resumeButton);
  vqeHost.appendChild(controls);

  const sliderRow = el("div", "row");
  const slider = el("input") as HTMLInputElement;
  slider.type = "range";
  slider.min = "0.01";
  slider.max = "0.5";
  slider.step = "0.01";
  slider.value = "0.25";
  const sliderLabel = el("span", "field-label", `learning rate ${slider.value}`);
  slider.addEventListener("input", () => {
    sliderLabel.textContent = `learning rate ${slider.value}`;
  });
  slider.addEventListener("change", () => control("set_learning_rate", Number(slider.value)));
  sliderRow.append(sliderLabel, slider);
  vqeHost.appendChild(sliderRow);

  const mitigationRow = el("div", "row");
  const mitigation = el("input") as HTMLInputElement;
  mitigation.type = "checkbox";
  mitigation.checked = state.vqe.mitigationOn;
  mitigation.addEventListener("change", () => {
    state.vqe.mitigationOn = mitigation.checked;
    void refreshStoredAndDraw();
  });
  mitigationRow.append(mitigation, el("span", "field-label", "CNOT error mitigation"));
  vqeHost.appendChild(mitigationRow);

  vqeHost.appendChild(
    el(
      "div",
      "vqe-status",
      state.vqe.recordId
        ? `run ${state.vqe.recordId.slice(0, 8)} (${state.vqe.sessionState}), ` +
            `${state.vqe.log.size} iterations`
        : "no active run",
    ),
  );
  vqeHost.appendChild(el("div", "chart-host"));
  drawChart();
}

function drawChart(): void {
  const host = vqeHost.querySelector(".chart-host");
  if (!host) {
    return;
  }
  const lines = [];
  if (state.vqe.finished && state.vqe.finished.status === "done") {
    const selection = selectChartSeries(state.vqe.finished, state.vqe.mitigationOn, state.vqe.stored);
    lines.push({ series: selection.series, className: "finished", label: selection.label });
    if (selection.missing) {
      host.replaceChildren(el("div", "hint", selection.missing));
    }
    if (!state.vqe.mitigationOn) {
      lines.push({
        series: objectiveSeries(iterationsOf(state.vqe.finished)),
        className: "finished",
        label: selection.label,
      });
    }
  } else {
    lines.push({
      series: liveSeries(state.vqe.log, false),
      className: "live",
      label: "energy",
    });
  }
  const geom = chartGeometry(lines.map((line) => line.series), 640, 280);
  const svg = renderChart(lines, geom);
  host.replaceChildren(svg);
}

async function createRun(mode: string): Promise<void> {
  try {
    const record = await client.submitTask({ kind: "vqe", params: {}, mode });
    state.vqe = {
      recordId: record.id,
      log: new EventLog(),
      subscribedTo: null,
      sessionState: "idle",
      mitigationOn: state.vqe.mitigationOn,
      finished: null,
      stored: state.vqe.stored,
    };
    drawVqe();
  } catch (err) {
    showVqeError(err);
  }
}

async function control(action: string, value?: number): Promise<void> {
  const id = state.vqe.recordId;
  if (!id) {
    showVqeError(new Error("create a run first"));
    return;
  }
  try {
    const ack = await client.control(id, action, value);
    state.vqe.sessionState = ack.session_state;
    drawVqe();
    if (action === "start") {
      void subscribe(id);
    }
  } catch (err) {
    showVqeError(err);
  }
}

/** One long-poll loop per open run; a newer subscription replaces it. */
async function subscribe(id: string): Promise<void> {
  if (state.vqe.subscribedTo === id) {
    return;
  }
  state.vqe.subscribedTo = id;
  while (state.vqe.subscribedTo === id) {
    try {
      const batch = await client.events(id, state.vqe.log.cursor, 20);
      state.vqe.log.add(batch.events);
      state.vqe.sessionState = batch.session_state;
      drawVqe();
      if (batch.record_status === "done" || batch.record_status === "failed") {
        state.vqe.finished = await client.getTask(id);
        await refreshStoredAndDraw();
        break;
      }
    } catch (err) {
      showVqeError(err);
      break;
    }
  }
  if (state.vqe.subscribedTo === id) {
    state.vqe.subscribedTo = null;
  }
}

async function refreshStoredAndDraw(): Promise<void> {
  try {
    state.vqe.stored = await client.listTasks({ kind: "vqe", status: "done" });
  } catch {
    // The toggle falls back to the unmitigated series when listing fails.
  }
  drawVqe();
}

function showVqeError(err: unknown): void {
  const detail = err instanceof ApiError ? `${err.status}: ${err.detail}` : String(err);
  vqeHost.appendChild(el("div", "hint", detail));
}

export function describeTheta(theta: number[]): string {
  return theta.map((t) => `${radToDeg(t).toFixed(1)}deg`).join(", ");
}

drawComposer();
resultHost.appendChild(el("h2", undefined, "Result"));
resultHost.appendChild(el("div", "hint", "compose a circuit, then Run or Simulate"));
drawVqe();
