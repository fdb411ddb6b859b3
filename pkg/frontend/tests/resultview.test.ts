import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import { pulseStrip, totalDurationUs } from "../src/pulses.js";
import { errorLine, fidelityBadge, matrixCells, statusChip } from "../src/resultview.js";
import { CircuitResult, RecordPayload, parseCircuit } from "../src/wire.js";

const record = JSON.parse(
  readFileSync(new URL("./fixtures/circuit_simulate.json", import.meta.url), "utf-8"),
) as RecordPayload;
const result = record.result as unknown as CircuitResult;

describe("matrix cells", () => {
  it("hands the wire numbers through untouched", () => {
    const cells = matrixCells(result.reconstructed, "re");
    expect(cells).toHaveLength(16);
    for (const cell of cells) {
      // Strict identity with the parsed wire value: no rounding, no
      // renormalization on the way to the DOM.
      expect(cell.value).toBe(result.reconstructed.re[cell.row]![cell.col]!);
      expect(Number(cell.exact)).toBe(cell.value);
    }
  });

  it("shows the four Bell-state corners", () => {
    const corners = matrixCells(result.simulated, "re").filter(
      (cell) => Math.abs(cell.value) > 0.4,
    );
    expect(corners.map((c) => [c.row, c.col])).toEqual([
      [0, 0],
      [0, 3],
      [3, 0],
      [3, 3],
    ]);
    for (const corner of corners) {
      expect(corner.value).toBeCloseTo(0.5, 12);
    }
  });
});

describe("badges and chips", () => {
  it("fidelity badge reads from the wire field", () => {
    const badge = fidelityBadge(result);
    expect(badge.text).toBe(`fidelity ${result.fidelity_vs_simulated.toFixed(4)}`);
    expect(badge.good).toBe(true);
  });

  it("status chip spells out the queue states", () => {
    expect(statusChip({ ...record, status: "queued" }).text).toContain("queued");
    expect(statusChip({ ...record, status: "running" }).tone).toBe("wait");
    expect(statusChip({ ...record, status: "failed", error: "boom" }).text).toBe("failed: boom");
  });

  it("error lines carry the record id and the verbatim detail", () => {
    expect(errorLine("abc123", "no grid point produced balanced populations")).toBe(
      "record abc123: no grid point produced balanced populations",
    );
  });
});

describe("pulse strip", () => {
  it("scales blocks by the documented slot widths", () => {
    const circuit = parseCircuit(
      '{"name":"bell","instructions":[{"kind":"H","target":1},{"kind":"CX"}]}',
    );
    const blocks = pulseStrip(circuit);
    expect(blocks).toHaveLength(2);
    expect(blocks[0]).toMatchObject({ lane: 1, kind: "rf", durationUs: 25 });
    expect(blocks[1]).toMatchObject({ lane: "both", kind: "rf", durationUs: 800 });
    expect(totalDurationUs(blocks)).toBe(825);
  });

  it("renders delays as free evolution with their own length", () => {
    const circuit = parseCircuit(
      '{"name":"t","instructions":[{"kind":"Delay","duration_s":0.002}]}',
    );
    const blocks = pulseStrip(circuit);
    expect(blocks[0]).toMatchObject({ kind: "free", durationUs: 2000 });
    expect(blocks[0]!.label).toContain("2.00 ms");
  });
});
