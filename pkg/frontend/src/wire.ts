/**
 * Wire types and canonical serialization shared with the device service.
 *
 * The service emits circuit JSON with compact separators and a fixed key
 * order (name, instructions; kind, target, angle_rad, duration_s). The
 * composer must reproduce those bytes exactly, so serialization here is
 * hand-assembled rather than delegated to JSON.stringify, and floats are
 * rendered the way the service's Python runtime renders them.
 */

export type GateKindName =
  | "X"
  | "Y"
  | "Z"
  | "X90"
  | "Y90"
  | "Z90"
  | "Rx"
  | "Ry"
  | "Rz"
  | "H"
  | "I"
  | "CX"
  | "CY"
  | "CZ"
  | "Delay";

export const SINGLE_QUBIT_KINDS: readonly GateKindName[] = [
  "X", "Y", "Z", "X90", "Y90", "Z90", "Rx", "Ry", "Rz", "H", "I",
];
export const TWO_QUBIT_KINDS: readonly GateKindName[] = ["CX", "CY", "CZ"];
export const ROTATION_KINDS: readonly GateKindName[] = ["Rx", "Ry", "Rz"];

export interface InstructionPayload {
  kind: GateKindName;
  target?: 1 | 2;
  angle_rad?: number;
  duration_s?: number;
}

export interface CircuitPayload {
  name: string;
  instructions: InstructionPayload[];
}

export interface MatrixWire {
  re: number[][];
  im: number[][];
}

export interface CircuitResult {
  coefficients: number[];
  reconstructed: MatrixWire;
  simulated: MatrixWire;
  projected: boolean;
  eta: number;
  fidelity_vs_simulated: number;
  counts?: Record<string, number>;
  distribution?: number[];
  mitigated_distribution?: number[];
}

export interface VqeIterationPayload {
  iteration: number;
  theta: number[];
  energy: number;
  energy_raw: number;
  grad_norm: number;
  alpha: number;
}

export interface VqeResult {
  initial_theta: number[];
  learning_rate: number;
  mode: string;
  mitigation: string;
  converged: boolean;
  learning_rate_halved: boolean;
  final_learning_rate: number;
  final_theta: number[];
  final_energy: number;
  iterations: VqeIterationPayload[];
}

export interface RecordPayload {
  id: string;
  created_at: string;
  kind: "circuit" | "vqe" | "geometric" | "pps-tune";
  params: Record<string, unknown>;
  mode: string | null;
  noise: Record<string, number> | null;
  seed: number | null;
  status: "queued" | "running" | "done" | "failed";
  result: Record<string, unknown> | null;
  error: string | null;
  completed_at: string | null;
}

export interface EventsResponse {
  events: VqeIterationPayload[];
  session_state: string;
  record_status: string;
}

export interface ControlAck {
  action: string;
  session_state: string;
  record_status: string;
}

/**
 * Render a finite double exactly as Python's repr would.
 *
 * Python uses the shortest round-tripping digits, fixed notation while
 * the decimal exponent sits in [-4, 16), an always-signed two-digit
 * exponent otherwise, and keeps a trailing ".0" on integral values.
 * JavaScript's own Number formatting differs in the switchover points
 * and drops the ".0", which would break byte compatibility.
 */
export function pythonFloatRepr(value: number): string {
  if (!Number.isFinite(value)) {
    throw new Error(`cannot serialize non-finite number ${value}`);
  }
  if (value === 0) {
    return Object.is(value, -0) ? "-0.0" : "0.0";
  }
  const sign = value < 0 ? "-" : "";
  const magnitude = Math.abs(value);
  // toExponential() without an argument yields the shortest digit string
  // that uniquely identifies the double.
  const [digitsPart, expPart] = magnitude.toExponential().split("e");
  const digits = (digitsPart as string).replace(".", "");
  const exponent = Number(expPart);
  if (exponent >= -4 && exponent < 16) {
    let text: string;
    if (exponent >= digits.length - 1) {
      text = digits + "0".repeat(exponent - digits.length + 1) + ".0";
    } else if (exponent >= 0) {
      text = digits.slice(0, exponent + 1) + "." + digits.slice(exponent + 1);
    } else {
      text = "0." + "0".repeat(-exponent - 1) + digits;
    }
    return sign + text;
  }
  const mantissa = digits.length > 1 ? digits[0] + "." + digits.slice(1) : digits;
  const expSign = exponent < 0 ? "-" : "+";
  const expDigits = String(Math.abs(exponent)).padStart(2, "0");
  return `${sign}${mantissa}e${expSign}${expDigits}`;
}

function jsonString(text: string): string {
  return JSON.stringify(text);
}

export function serializeInstruction(inst: InstructionPayload): string {
  const parts = [`"kind":${jsonString(inst.kind)}`];
  if (inst.target !== undefined) {
    parts.push(`"target":${inst.target}`);
  }
  if (inst.angle_rad !== undefined) {
    parts.push(`"angle_rad":${pythonFloatRepr(inst.angle_rad)}`);
  }
  if (inst.duration_s !== undefined) {
    parts.push(`"duration_s":${pythonFloatRepr(inst.duration_s)}`);
  }
  return `{${parts.join(",")}}`;
}

export function serializeCircuit(circuit: CircuitPayload): string {
  const body = circuit.instructions.map(serializeInstruction).join(",");
  return `{"name":${jsonString(circuit.name)},"instructions":[${body}]}`;
}

const KIND_SET = new Set<string>([...SINGLE_QUBIT_KINDS, ...TWO_QUBIT_KINDS, "Delay"]);

/** Parse and validate circuit JSON into the payload shape. */
export function parseCircuit(text: string): CircuitPayload {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new Error(`not valid JSON: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new Error("circuit must be a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  if (typeof obj.name !== "string") {
    throw new Error("circuit needs a string name");
  }
  if (!Array.isArray(obj.instructions)) {
    throw new Error("circuit needs an instructions list");
  }
  const instructions = obj.instructions.map((entry, i) => {
    if (typeof entry !== "object" || entry === null) {
      throw new Error(`instruction ${i} must be an object`);
    }
    const inst = entry as Record<string, unknown>;
    const kind = inst.kind;
    if (typeof kind !== "string" || !KIND_SET.has(kind)) {
      throw new Error(`instruction ${i} has unknown kind ${JSON.stringify(kind)}`);
    }
    const out: InstructionPayload = { kind: kind as GateKindName };
    if (inst.target !== undefined) {
      if (inst.target !== 1 && inst.target !== 2) {
        throw new Error(`instruction ${i} target must be 1 or 2`);
      }
      out.target = inst.target;
    }
    if (inst.angle_rad !== undefined) {
      if (typeof inst.angle_rad !== "number" || !Number.isFinite(inst.angle_rad)) {
        throw new Error(`instruction ${i} angle_rad must be a finite number`);
      }
      out.angle_rad = inst.angle_rad;
    }
    if (inst.duration_s !== undefined) {
      if (typeof inst.duration_s !== "number" || inst.duration_s < 0) {
        throw new Error(`instruction ${i} duration_s must be nonnegative`);
      }
      out.duration_s = inst.duration_s;
    }
    return out;
  });
  return { name: obj.name, instructions };
}

export function degToRad(degrees: number): number {
  return (degrees * Math.PI) / 180;
}

export function radToDeg(radians: number): number {
  return (radians * 180) / Math.PI;
}
