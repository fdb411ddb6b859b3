/**
 * DOM builders. Everything here is write-only rendering: state lives in
 * main.ts and the model modules, and handlers are passed in.
 */

import { ComposerDocument, Lane } from "./composer.js";
import { pulseStrip, formatDuration, totalDurationUs } from "./pulses.js";
import { CellView, basisLabel, fidelityBadge, matrixCells, statusChip } from "./resultview.js";
import { ChartGeometry, SeriesPoint, THEORY_ENERGY, toPolylinePoints, yPixel } from "./vqe.js";
import { CircuitPayload, CircuitResult, MatrixWire, RecordPayload } from "./wire.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export type MatrixView = "heat" | "bars";

function heatColor(value: number): string {
  const v = Math.max(-1, Math.min(1, value));
  if (v >= 0) {
    const t = v;
    return `rgb(${255 - Math.round(150 * t)}, ${255 - Math.round(190 * t)}, 255)`;
  }
  const t = -v;
  return `rgb(255, ${255 - Math.round(190 * t)}, ${255 - Math.round(150 * t)})`;
}

function matrixGrid(wire: MatrixWire, part: "re" | "im", view: MatrixView): HTMLElement {
  const grid = el("div", `matrix-grid view-${view}`);
  grid.style.display = "grid";
  grid.style.gridTemplateColumns = `auto repeat(4, 1fr)`;
  grid.appendChild(el("span", "matrix-corner", part));
  for (let j = 0; j < 4; j++) {
    grid.appendChild(el("span", "matrix-head", `|${basisLabel(j)}>`));
  }
  let row = -1;
  for (const cell of matrixCells(wire, part)) {
    if (cell.row !== row) {
      row = cell.row;
      grid.appendChild(el("span", "matrix-head", `<${basisLabel(row)}|`));
    }
    grid.appendChild(matrixCell(cell, view));
  }
  return grid;
}

function matrixCell(cell: CellView, view: MatrixView): HTMLElement {
  const node = el("div", "matrix-cell");
  node.title = cell.exact;
  node.dataset.value = cell.exact;
  if (view === "heat") {
    node.style.background = heatColor(cell.value);
    node.textContent = cell.display;
  } else {
    const bar = el("div", "matrix-bar");
    const height = Math.min(1, Math.abs(cell.value)) * 100;
    bar.style.height = `${height}%`;
    bar.classList.add(cell.value >= 0 ? "positive" : "negative");
    node.appendChild(bar);
    node.appendChild(el("span", "matrix-bar-label", cell.display));
  }
  return node;
}

export function renderStatePanel(
  title: string,
  wire: MatrixWire,
  view: MatrixView,
): HTMLElement {
  const panel = el("section", "state-panel");
  panel.appendChild(el("h3", undefined, title));
  panel.appendChild(matrixGrid(wire, "re", view));
  panel.appendChild(matrixGrid(wire, "im", view));
  return panel;
}

export function renderResultPanel(result: CircuitResult, view: MatrixView): HTMLElement {
  const wrap = el("div", "result-panel");
  const badge = fidelityBadge(result);
  const badgeNode = el("span", badge.good ? "badge ok" : "badge bad", badge.text);
  wrap.appendChild(badgeNode);
  const pair = el("div", "state-pair");
  pair.appendChild(renderStatePanel("experiment", result.reconstructed, view));
  pair.appendChild(renderStatePanel("simulation", result.simulated, view));
  wrap.appendChild(pair);
  if (result.distribution) {
    const counts = el("div", "counts-line");
    counts.textContent =
      "readout " +
      result.distribution.map((p, i) => `${basisLabel(i)}:${p.toFixed(3)}`).join("  ");
    wrap.appendChild(counts);
  }
  return wrap;
}

export function renderStatusChip(record: RecordPayload): HTMLElement {
  const chip = statusChip(record);
  return el("span", `chip ${chip.tone}`, chip.text);
}

export function renderPulseStrip(circuit: CircuitPayload): HTMLElement {
  const blocks = pulseStrip(circuit);
  const strip = el("div", "pulse-strip");
  for (const lane of [1, 2] as const) {
    const row = el("div", "pulse-lane");
    row.appendChild(el("span", "pulse-lane-label", lane === 1 ? "1H" : "31P"));
    for (const block of blocks) {
      const seg = el("div", `pulse-block ${block.kind}`);
      // Square-root scaling keeps 25 us pulses visible next to 800 us slots.
      seg.style.width = `${Math.max(14, Math.sqrt(block.durationUs) * 3)}px`;
      if (block.lane === "both" || block.lane === lane) {
        seg.textContent = block.label;
      } else {
        seg.classList.add("idle");
      }
      row.appendChild(seg);
    }
    strip.appendChild(row);
  }
  strip.appendChild(
    el("div", "pulse-total", `total ${formatDuration(totalDurationUs(blocks))}`),
  );
  return strip;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ChartLine {
  series: SeriesPoint[];
  className: string;
  label: string;
}

export function renderChart(lines: readonly ChartLine[], geom: ChartGeometry): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${geom.width} ${geom.height}`);
  svg.setAttribute("class", "energy-chart");

  const theory = document.createElementNS(SVG_NS, "line");
  const ty = yPixel(THEORY_ENERGY, geom);
  theory.setAttribute("x1", "0");
  theory.setAttribute("x2", String(geom.width));
  theory.setAttribute("y1", String(ty));
  theory.setAttribute("y2", String(ty));
  theory.setAttribute("class", "theory-line");
  svg.appendChild(theory);

  const theoryLabel = document.createElementNS(SVG_NS, "text");
  theoryLabel.setAttribute("x", "4");
  theoryLabel.setAttribute("y", String(ty - 4));
  theoryLabel.setAttribute("class", "theory-label");
  theoryLabel.textContent = "exact ground energy -3";
  svg.appendChild(theoryLabel);

  for (const line of lines) {
    if (line.series.length === 0) {
      continue;
    }
    const poly = document.createElementNS(SVG_NS, "polyline");
    poly.setAttribute("points", toPolylinePoints(line.series, geom));
    poly.setAttribute("class", `energy-line ${line.className}`);
    poly.setAttribute("fill", "none");
    svg.appendChild(poly);
  }
  return svg;
}

export interface GridHandlers {
  onDrop: (column: number, lane: Lane) => void;
  onRemove: (column: number, lane: Lane) => void;
}

export function renderComposerGrid(doc: ComposerDocument, handlers: GridHandlers): HTMLElement {
  const columns = doc.columns.length + 1;
  const grid = el("div", "composer-grid");
  grid.style.gridTemplateColumns = `auto repeat(${columns}, 64px)`;
  for (const lane of [1, 2] as const) {
    grid.appendChild(el("span", "lane-label", lane === 1 ? "q1 (1H)" : "q2 (31P)"));
    for (let c = 0; c < columns; c++) {
      grid.appendChild(renderCell(doc, c, lane, handlers));
    }
  }
  return grid;
}

function renderCell(
  doc: ComposerDocument,
  columnIndex: number,
  lane: Lane,
  handlers: GridHandlers,
): HTMLElement {
  const column = doc.columns[columnIndex];
  const cell = el("div", "grid-cell");
  cell.dataset.column = String(columnIndex);
  cell.dataset.lane = String(lane);

  let label = "";
  if (column?.type === "span") {
    cell.classList.add("span-cell");
    label = lane === 1 ? column.gate.kind : "";
    if (lane === 1) {
      cell.classList.add("span-top");
    } else {
      cell.classList.add("span-bottom");
    }
  } else if (column?.type === "pair") {
    const gate = lane === 1 ? column.lane1 : column.lane2;
    if (gate) {
      label = gate.kind;
      if (gate.angleRad !== undefined) {
        label += ` ${((gate.angleRad * 180) / Math.PI).toFixed(1)}`;
      }
      if (gate.durationS !== undefined) {
        label += ` ${formatDuration(gate.durationS * 1e6)}`;
      }
      cell.classList.add("filled");
    }
  }
  cell.textContent = label;

  cell.addEventListener("dragover", (event) => event.preventDefault());
  cell.addEventListener("drop", (event) => {
    event.preventDefault();
    handlers.onDrop(columnIndex, lane);
  });
  cell.addEventListener("click", () => handlers.onDrop(columnIndex, lane));
  cell.addEventListener("contextmenu", (event) => {
    event.preventDefault();
    handlers.onRemove(columnIndex, lane);
  });
  return cell;
}
