/**
 * Client-side event log for one descent session.
 *
 * The service delivers iteration events ordered and at least once, so
 * redeliveries must collapse by iteration index. A redelivered index
 * whose numbers disagree with what we already hold is kept out of the
 * chart and flagged instead, since silently replacing data would make
 * the displayed history unstable.
 */

import { VqeIterationPayload } from "./wire.js";

export class EventLog {
  private byIteration = new Map<number, VqeIterationPayload>();
  private ordered: VqeIterationPayload[] = [];
  conflicts: number[] = [];

  /** Returns how many events were new. */
  add(events: readonly VqeIterationPayload[]): number {
    let appended = 0;
    for (const event of events) {
      const existing = this.byIteration.get(event.iteration);
      if (existing) {
        if (existing.energy !== event.energy || existing.energy_raw !== event.energy_raw) {
          this.conflicts.push(event.iteration);
        }
        continue;
      }
      this.byIteration.set(event.iteration, event);
      appended += 1;
    }
    if (appended > 0) {
      this.ordered = [...this.byIteration.values()].sort((a, b) => a.iteration - b.iteration);
    }
    return appended;
  }

  get size(): number {
    return this.byIteration.size;
  }

  /** Highest index seen; the next poll's `since` cursor. */
  get cursor(): number {
    let highest = 0;
    for (const iteration of this.byIteration.keys()) {
      if (iteration > highest) {
        highest = iteration;
      }
    }
    return highest;
  }

  all(): readonly VqeIterationPayload[] {
    return this.ordered;
  }

  series(field: "energy" | "energy_raw" | "grad_norm" | "alpha"): Array<[number, number]> {
    return this.ordered.map((event) => [event.iteration, event[field]]);
  }

  /** True when indices run 1..size with no holes. */
  get contiguous(): boolean {
    return this.ordered.every((event, i) => event.iteration === i + 1);
  }
}
