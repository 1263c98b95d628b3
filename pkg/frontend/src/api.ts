/** Typed client for the datadesk chat service (see docs/http-api.md). */

export interface TaskDoc {
  chi: "data" | "query";
  kappa: string;
  ordinal: number;
}

export interface ArtifactRef {
  id: string;
  kind: string;
}

export interface TableDoc {
  name: string;
  columns: { name: string; kind: string }[];
  rows: string[][];
}

export interface ResultDoc {
  type: "table" | "clustering" | "predictions" | "classifications" | "artifact" | "error" | "opaque";
  table?: TableDoc;
  kind?: string;
  path?: string;
  sidecar?: string;
  message?: string;
  warnings?: string[];
}

export interface TurnDoc {
  turn: number;
  query: string;
  tasks: TaskDoc[];
  plans: string[];
  results: ResultDoc[];
  artifacts: ArtifactRef[];
  explanation: string;
  error: string | null;
}

export interface DatasetDoc {
  name: string;
  description: string;
  rows: number;
  schema: { name: string; kind: string }[];
  sample: string[][];
}

export interface SessionInfo {
  session_id: string;
  seed: number;
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(detail, response.status);
    }
    return response;
  }

  async createSession(seed?: number): Promise<SessionInfo> {
    const response = await this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(seed === undefined ? {} : { seed }),
    });
    return response.json();
  }

  async sendMessage(sessionId: string, text: string): Promise<TurnDoc> {
    const response = await this.request(`/sessions/${sessionId}/messages`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    return response.json();
  }

  async history(sessionId: string): Promise<TurnDoc[]> {
    const response = await this.request(`/sessions/${sessionId}/history`);
    return response.json();
  }

  async datasets(): Promise<DatasetDoc[]> {
    const response = await this.request("/datasets");
    return response.json();
  }

  /** Artifact bytes as text; charts are SVG documents. */
  async artifact(id: string): Promise<string> {
    const response = await this.request(`/artifacts/${id}`);
    return response.text();
  }
}
