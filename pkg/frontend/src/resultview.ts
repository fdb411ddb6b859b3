/**
 * Pure helpers behind the result panel. The numbers handed to the DOM
 * are exactly the wire numbers; formatting happens at the last moment
 * and the exact value rides along for the hover title.
 */

import { CircuitResult, MatrixWire, RecordPayload } from "./wire.js";

export interface CellView {
  row: number;
  col: number;
  value: number;
  display: string;
  exact: string;
}

const BASIS = ["00", "01", "10", "11"];

export function basisLabel(index: number): string {
  return BASIS[index] ?? String(index);
}

export function matrixCells(wire: MatrixWire, part: "re" | "im"): CellView[] {
  const grid = wire[part];
  const cells: CellView[] = [];
  grid.forEach((row, i) => {
    row.forEach((value, j) => {
      cells.push({
        row: i,
        col: j,
        value,
        display: value.toFixed(3),
        exact: String(value),
      });
    });
  });
  return cells;
}

export function fidelityBadge(result: CircuitResult): { text: string; good: boolean } {
  const f = result.fidelity_vs_simulated;
  return { text: `fidelity ${f.toFixed(4)}`, good: f >= 0.9 };
}

export function statusChip(record: RecordPayload): { text: string; tone: string } {
  switch (record.status) {
    case "queued":
      return { text: "queued, device busy", tone: "wait" };
    case "running":
      return { text: "running", tone: "wait" };
    case "done":
      return { text: "done", tone: "ok" };
    case "failed":
      return { text: `failed: ${record.error ?? "unknown error"}`, tone: "bad" };
  }
}

/** Service errors are shown verbatim next to the record id. */
export function errorLine(recordId: string, detail: string): string {
  return `record ${recordId}: ${detail}`;
}
