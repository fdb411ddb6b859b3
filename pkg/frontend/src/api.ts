/**
 * Typed client for the device-service HTTP API. This is the only place
 * the UI touches the network; everything else works on returned
 * payloads.
 */

import { ControlAck, EventsResponse, RecordPayload } from "./wire.js";

export interface TaskDraft {
  kind: "circuit" | "vqe" | "geometric" | "pps-tune";
  params: Record<string, unknown>;
  mode?: string;
  noise?: Record<string, number>;
  seed?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(detail);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof (body as { detail?: unknown }).detail === "string"
          ? (body as { detail: string }).detail
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  submitTask(draft: TaskDraft): Promise<RecordPayload> {
    return this.request<RecordPayload>("/api/tasks", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(draft),
    });
  }

  getTask(id: string): Promise<RecordPayload> {
    return this.request<RecordPayload>(`/api/tasks/${encodeURIComponent(id)}`);
  }

  async listTasks(filter: { kind?: string; status?: string } = {}): Promise<RecordPayload[]> {
    const query = new URLSearchParams();
    if (filter.kind) {
      query.set("kind", filter.kind);
    }
    if (filter.status) {
      query.set("status", filter.status);
    }
    const suffix = query.toString();
    const body = await this.request<{ tasks: RecordPayload[] }>(
      `/api/tasks${suffix ? "?" + suffix : ""}`,
    );
    return body.tasks;
  }

  control(id: string, action: string, value?: number): Promise<ControlAck> {
    const body: Record<string, unknown> = { action };
    if (value !== undefined) {
      body.value = value;
    }
    return this.request<ControlAck>(`/api/vqe/${encodeURIComponent(id)}/control`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  events(id: string, since: number, waitS = 0): Promise<EventsResponse> {
    const query = new URLSearchParams({ since: String(since) });
    if (waitS > 0) {
      query.set("wait_s", String(waitS));
    }
    return this.request<EventsResponse>(`/api/vqe/${encodeURIComponent(id)}/events?${query}`);
  }
}

/** Poll a record until it leaves the queue, reporting each status. */
export async function pollUntilSettled(
  client: ApiClient,
  id: string,
  onStatus: (record: RecordPayload) => void,
  intervalMs = 400,
  sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
): Promise<RecordPayload> {
  for (;;) {
    const record = await client.getTask(id);
    onStatus(record);
    if (record.status === "done" || record.status === "failed") {
      return record;
    }
    await sleep(intervalMs);
  }
}
