/**
 * Grid model behind the two-lane circuit composer.
 *
 * The document is a list of time columns. A column either holds one
 * independent cell per lane or is spanned by a single controlled gate,
 * which is what keeps serialization order unambiguous. All placement
 * rules are enforced here so the drag layer only has to relay drops and
 * show the returned hint when one is refused.
 */

import {
  CircuitPayload,
  GateKindName,
  InstructionPayload,
  ROTATION_KINDS,
  SINGLE_QUBIT_KINDS,
  TWO_QUBIT_KINDS,
  degToRad,
  parseCircuit,
  serializeCircuit,
} from "./wire.js";

export type Lane = 1 | 2;

export interface PlacedGate {
  kind: GateKindName;
  angleRad?: number;
  durationS?: number;
}

export type Column =
  | { type: "pair"; lane1: PlacedGate | null; lane2: PlacedGate | null }
  | { type: "span"; gate: PlacedGate };

export interface ComposerDocument {
  name: string;
  columns: Column[];
}

export interface PaletteEntry {
  kind: GateKindName;
  arity: 1 | 2;
  needsAngle: boolean;
  needsDuration: boolean;
  label: string;
}

export const PALETTE: readonly PaletteEntry[] = [
  ...SINGLE_QUBIT_KINDS.map((kind) => ({
    kind,
    arity: 1 as const,
    needsAngle: ROTATION_KINDS.includes(kind),
    needsDuration: false,
    label: kind,
  })),
  ...TWO_QUBIT_KINDS.map((kind) => ({
    kind,
    arity: 2 as const,
    needsAngle: false,
    needsDuration: false,
    label: kind,
  })),
  { kind: "Delay", arity: 2, needsAngle: false, needsDuration: true, label: "Delay" },
];

export function paletteEntry(kind: GateKindName): PaletteEntry {
  const entry = PALETTE.find((e) => e.kind === kind);
  if (!entry) {
    throw new Error(`unknown palette gate ${kind}`);
  }
  return entry;
}

export function newDocument(name: string): ComposerDocument {
  return { name, columns: [] };
}

export type PlacementResult =
  | { ok: true; doc: ComposerDocument }
  | { ok: false; hint: string };

function emptyPair(): Column {
  return { type: "pair", lane1: null, lane2: null };
}

function cloneColumns(doc: ComposerDocument): Column[] {
  return doc.columns.map((col) =>
    col.type === "span"
      ? { type: "span", gate: { ...col.gate } }
      : { type: "pair", lane1: col.lane1 && { ...col.lane1 }, lane2: col.lane2 && { ...col.lane2 } },
  );
}

function padTo(columns: Column[], index: number): void {
  while (columns.length <= index) {
    columns.push(emptyPair());
  }
}

/**
 * Place a gate at (column, lane). Two-qubit gates ignore the lane and
 * claim the whole column. Dropping past the current width appends empty
 * columns first, so "anywhere to the right" always works.
 */
export function placeGate(
  doc: ComposerDocument,
  columnIndex: number,
  lane: Lane,
  gate: PlacedGate,
): PlacementResult {
  if (columnIndex < 0 || !Number.isInteger(columnIndex)) {
    return { ok: false, hint: "drop onto a grid column" };
  }
  const entry = paletteEntry(gate.kind);
  if (entry.needsAngle && !(typeof gate.angleRad === "number" && Number.isFinite(gate.angleRad))) {
    return { ok: false, hint: `${gate.kind} needs an angle` };
  }
  if (entry.needsDuration && !(typeof gate.durationS === "number" && gate.durationS >= 0)) {
    return { ok: false, hint: `${gate.kind} needs a nonnegative duration` };
  }
  const columns = cloneColumns(doc);
  padTo(columns, columnIndex);
  const column = columns[columnIndex] as Column;

  if (entry.arity === 2) {
    if (column.type === "span") {
      return { ok: false, hint: `column ${columnIndex + 1} already holds ${column.gate.kind}` };
    }
    if (column.lane1 || column.lane2) {
      return {
        ok: false,
        hint: `column ${columnIndex + 1} is occupied; ${gate.kind} needs both lanes free`,
      };
    }
    columns[columnIndex] = { type: "span", gate: { ...gate } };
    return { ok: true, doc: { name: doc.name, columns } };
  }

  if (column.type === "span") {
    return {
      ok: false,
      hint: `column ${columnIndex + 1} is spanned by ${column.gate.kind}; drop in a free column`,
    };
  }
  const cell = lane === 1 ? column.lane1 : column.lane2;
  if (cell) {
    return { ok: false, hint: `lane ${lane}, column ${columnIndex + 1} already holds ${cell.kind}` };
  }
  if (lane === 1) {
    column.lane1 = { ...gate };
  } else {
    column.lane2 = { ...gate };
  }
  return { ok: true, doc: { name: doc.name, columns } };
}

export function removeGate(doc: ComposerDocument, columnIndex: number, lane: Lane): ComposerDocument {
  const columns = cloneColumns(doc);
  const column = columns[columnIndex];
  if (!column) {
    return doc;
  }
  if (column.type === "span") {
    columns[columnIndex] = emptyPair();
  } else if (lane === 1) {
    column.lane1 = null;
  } else {
    column.lane2 = null;
  }
  while (columns.length > 0) {
    const last = columns[columns.length - 1] as Column;
    if (last.type === "pair" && !last.lane1 && !last.lane2) {
      columns.pop();
    } else {
      break;
    }
  }
  return { name: doc.name, columns };
}

function gateToInstruction(gate: PlacedGate, lane?: Lane): InstructionPayload {
  const inst: InstructionPayload = { kind: gate.kind };
  if (lane !== undefined) {
    inst.target = lane;
  }
  if (gate.angleRad !== undefined) {
    inst.angle_rad = gate.angleRad;
  }
  if (gate.durationS !== undefined) {
    inst.duration_s = gate.durationS;
  }
  return inst;
}

/** Columns left to right; inside a column lane 1 precedes lane 2. */
export function documentToCircuit(doc: ComposerDocument): CircuitPayload {
  const instructions: InstructionPayload[] = [];
  for (const column of doc.columns) {
    if (column.type === "span") {
      instructions.push(gateToInstruction(column.gate));
    } else {
      if (column.lane1) {
        instructions.push(gateToInstruction(column.lane1, 1));
      }
      if (column.lane2) {
        instructions.push(gateToInstruction(column.lane2, 2));
      }
    }
  }
  return { name: doc.name, instructions };
}

export function serializeDocument(doc: ComposerDocument): string {
  return serializeCircuit(documentToCircuit(doc));
}

/** One column per instruction; round-tripping keeps the byte form. */
export function circuitToDocument(circuit: CircuitPayload): ComposerDocument {
  const columns: Column[] = [];
  for (const inst of circuit.instructions) {
    const gate: PlacedGate = { kind: inst.kind };
    if (inst.angle_rad !== undefined) {
      gate.angleRad = inst.angle_rad;
    }
    if (inst.duration_s !== undefined) {
      gate.durationS = inst.duration_s;
    }
    const entry = paletteEntry(inst.kind);
    if (entry.arity === 2) {
      columns.push({ type: "span", gate });
    } else {
      const column = emptyPair() as { type: "pair"; lane1: PlacedGate | null; lane2: PlacedGate | null };
      if (inst.target === 2) {
        column.lane2 = gate;
      } else {
        column.lane1 = gate;
      }
      columns.push(column);
    }
  }
  return { name: circuit.name, columns };
}

export function loadDocument(text: string): ComposerDocument {
  return circuitToDocument(parseCircuit(text));
}

/** Angle dialogs work in degrees; the wire carries radians. */
export function gateFromDialog(
  kind: GateKindName,
  angleDeg?: number,
  durationS?: number,
): PlacedGate {
  const entry = paletteEntry(kind);
  const gate: PlacedGate = { kind };
  if (entry.needsAngle) {
    if (angleDeg === undefined || !Number.isFinite(angleDeg)) {
      throw new Error(`${kind} needs an angle in degrees`);
    }
    gate.angleRad = degToRad(angleDeg);
  }
  if (entry.needsDuration) {
    if (durationS === undefined || !(durationS >= 0)) {
      throw new Error(`${kind} needs a nonnegative duration in seconds`);
    }
    gate.durationS = durationS;
  }
  return gate;
}
