import { describe, expect, it } from "vitest";

import {
  circuitToDocument,
  documentToCircuit,
  gateFromDialog,
  loadDocument,
  newDocument,
  placeGate,
  removeGate,
  serializeDocument,
} from "../src/composer.js";

const BELL_BYTES = '{"name":"bell","instructions":[{"kind":"H","target":1},{"kind":"CX"}]}';

function mustPlace(doc: ReturnType<typeof newDocument>, column: number, lane: 1 | 2, gate: Parameters<typeof placeGate>[3]) {
  const placed = placeGate(doc, column, lane, gate);
  if (!placed.ok) {
    throw new Error(placed.hint);
  }
  return placed.doc;
}

describe("composing the Bell circuit", () => {
  it("serializes to the documented bytes exactly", () => {
    let doc = newDocument("bell");
    doc = mustPlace(doc, 0, 1, { kind: "H" });
    doc = mustPlace(doc, 1, 1, { kind: "CX" });
    expect(serializeDocument(doc)).toBe(BELL_BYTES);
  });

  it("CX claims both lanes regardless of the drop lane", () => {
    let doc = newDocument("bell");
    doc = mustPlace(doc, 0, 1, { kind: "H" });
    doc = mustPlace(doc, 1, 2, { kind: "CX" });
    expect(serializeDocument(doc)).toBe(BELL_BYTES);
    expect(doc.columns[1]?.type).toBe("span");
  });
});

describe("placement rules", () => {
  it("drops X90 on lane 1 column 1", () => {
    const doc = mustPlace(newDocument("t"), 0, 1, { kind: "X90" });
    expect(documentToCircuit(doc).instructions).toEqual([{ kind: "X90", target: 1 }]);
  });

  it("refuses a second gate in an occupied cell", () => {
    const doc = mustPlace(newDocument("t"), 0, 1, { kind: "X" });
    const refused = placeGate(doc, 0, 1, { kind: "Y" });
    expect(refused.ok).toBe(false);
    if (!refused.ok) {
      expect(refused.hint).toContain("already holds X");
    }
  });

  it("lets the other lane of the same column be used", () => {
    let doc = mustPlace(newDocument("t"), 0, 1, { kind: "X" });
    doc = mustPlace(doc, 0, 2, { kind: "Y" });
    expect(documentToCircuit(doc).instructions).toEqual([
      { kind: "X", target: 1 },
      { kind: "Y", target: 2 },
    ]);
  });

  it("refuses a controlled gate when either lane is occupied", () => {
    const doc = mustPlace(newDocument("t"), 0, 2, { kind: "Z" });
    const refused = placeGate(doc, 0, 1, { kind: "CZ" });
    expect(refused.ok).toBe(false);
    if (!refused.ok) {
      expect(refused.hint).toContain("needs both lanes free");
    }
  });

  it("refuses a single-qubit drop onto a spanned column", () => {
    const doc = mustPlace(newDocument("t"), 0, 1, { kind: "CX" });
    const refused = placeGate(doc, 0, 2, { kind: "H" });
    expect(refused.ok).toBe(false);
    if (!refused.ok) {
      expect(refused.hint).toContain("spanned by CX");
    }
  });

  it("pads intermediate columns when dropping far right", () => {
    const doc = mustPlace(newDocument("t"), 3, 2, { kind: "H" });
    expect(doc.columns).toHaveLength(4);
    expect(documentToCircuit(doc).instructions).toEqual([{ kind: "H", target: 2 }]);
  });

  it("requires an angle for rotations at placement time", () => {
    const refused = placeGate(newDocument("t"), 0, 1, { kind: "Rx" });
    expect(refused.ok).toBe(false);
    if (!refused.ok) {
      expect(refused.hint).toContain("needs an angle");
    }
  });

  it("removing the last gate trims trailing empty columns", () => {
    let doc = mustPlace(newDocument("t"), 0, 1, { kind: "X" });
    doc = mustPlace(doc, 2, 1, { kind: "Y" });
    doc = removeGate(doc, 2, 1);
    expect(doc.columns).toHaveLength(1);
  });
});

describe("angle dialog", () => {
  it("serializes 45 degrees as the exact radian value", () => {
    const gate = gateFromDialog("Rx", 45);
    let doc = newDocument("t");
    doc = mustPlace(doc, 0, 1, gate);
    expect(serializeDocument(doc)).toBe(
      '{"name":"t","instructions":[{"kind":"Rx","target":1,"angle_rad":0.7853981633974483}]}',
    );
  });

  it("delay takes a duration in seconds", () => {
    const gate = gateFromDialog("Delay", undefined, 0.002);
    const doc = mustPlace(newDocument("t"), 0, 1, gate);
    expect(serializeDocument(doc)).toBe(
      '{"name":"t","instructions":[{"kind":"Delay","duration_s":0.002}]}',
    );
  });

  it("rejects a rotation without an angle", () => {
    expect(() => gateFromDialog("Ry")).toThrow("needs an angle");
  });
});

describe("round trips", () => {
  const documents = [
    () => {
      let doc = newDocument("bell");
      doc = mustPlace(doc, 0, 1, { kind: "H" });
      doc = mustPlace(doc, 1, 1, { kind: "CX" });
      return doc;
    },
    () => {
      let doc = newDocument("mixed");
      doc = mustPlace(doc, 0, 1, { kind: "X90" });
      doc = mustPlace(doc, 0, 2, { kind: "Y90" });
      doc = mustPlace(doc, 1, 1, { kind: "CZ" });
      doc = mustPlace(doc, 2, 2, gateFromDialog("Rz", 30));
      doc = mustPlace(doc, 3, 1, gateFromDialog("Delay", undefined, 2.5e-5));
      return doc;
    },
    () => newDocument("empty"),
  ];

  it.each(documents.map((make, i) => [i, make] as const))(
    "serialize, load, serialize is byte identical (case %d)",
    (_i, make) => {
      const first = serializeDocument(make());
      const second = serializeDocument(loadDocument(first));
      expect(second).toBe(first);
    },
  );

  it("keeps instruction order across document reconstruction", () => {
    const doc = documents[1]!();
    const reloaded = circuitToDocument(documentToCircuit(doc));
    expect(documentToCircuit(reloaded)).toEqual(documentToCircuit(doc));
  });
});
