/**
 * Schematic pulse strip drawn under the composed circuit.
 *
 * The strip shows each instruction as a block scaled by the time slot
 * it occupies on the instrument: 25 us for a single-spin pulse, 800 us
 * for a controlled gate, and a delay's own length. These slot widths
 * are the documented device numbers, not results, so the strip can be
 * drawn client-side without asking the service.
 */

import { CircuitPayload } from "./wire.js";

export const SINGLE_SLOT_US = 25;
export const CONTROLLED_SLOT_US = 800;

export interface StripBlock {
  lane: 1 | 2 | "both";
  kind: "rf" | "free";
  label: string;
  durationUs: number;
}

export function pulseStrip(circuit: CircuitPayload): StripBlock[] {
  const blocks: StripBlock[] = [];
  for (const inst of circuit.instructions) {
    if (inst.kind === "Delay") {
      blocks.push({
        lane: "both",
        kind: "free",
        label: `free ${formatDuration((inst.duration_s ?? 0) * 1e6)}`,
        durationUs: (inst.duration_s ?? 0) * 1e6,
      });
    } else if (inst.kind === "CX" || inst.kind === "CY" || inst.kind === "CZ") {
      blocks.push({
        lane: "both",
        kind: "rf",
        label: inst.kind,
        durationUs: CONTROLLED_SLOT_US,
      });
    } else {
      blocks.push({
        lane: (inst.target ?? 1) as 1 | 2,
        kind: "rf",
        label: inst.kind,
        durationUs: SINGLE_SLOT_US,
      });
    }
  }
  return blocks;
}

export function totalDurationUs(blocks: readonly StripBlock[]): number {
  return blocks.reduce((sum, block) => sum + block.durationUs, 0);
}

export function formatDuration(us: number): string {
  if (us >= 1e6) {
    return `${(us / 1e6).toFixed(2)} s`;
  }
  if (us >= 1e3) {
    return `${(us / 1e3).toFixed(2)} ms`;
  }
  return `${us.toFixed(0)} us`;
}
