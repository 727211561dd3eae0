/** Typed client for the curation service's /v1 HTTP API. */

export interface DatasetSummary {
  dataset_id: string;
  users: number;
  seed_users: number;
  tweets: number;
  lists: number;
}

export interface SessionSummary {
  session_id: string;
  dataset_id: string;
  criteria: string[];
  seed_count: number;
  rejected_count: number;
  candidate_count: number;
  decisions: number;
}

export interface CriterionScore {
  score: number;
  standardized: number;
}

export interface RecommendationItem {
  rank: number;
  user_id: string;
  screen_name: string;
  score: number;
  criteria: Record<string, CriterionScore>;
}

export interface Recommendations {
  session_id: string;
  k: number;
  returned: number;
  truncated: boolean;
  degenerate: boolean;
  items: RecommendationItem[];
}

export interface ExportMember {
  user_id: string;
  screen_name: string;
  origin: "seed" | "accepted";
  seq: number | null;
}

export interface ExportDecision {
  seq: number;
  user_id: string;
  action: "accept" | "reject";
  curator: string;
}

export interface ExportDocument {
  session_id: string;
  dataset_id: string;
  members: ExportMember[];
  decisions: ExportDecision[];
}

export interface CohesionEntry {
  criterion: string;
  raw: number;
  expected: number;
  corrected: number;
  randomizations: number;
  null_std: number;
  expected_se: number;
}

export interface CohesionReport {
  session_id: string;
  seed_count: number;
  entries: CohesionEntry[];
}

export type DecisionAction = "accept" | "reject";

/** Error carrying the service's {code, message} payload and HTTP status. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface CurationApiOptions {
  fetchImpl?: typeof fetch;
  token?: string;
}

export class CurationApi {
  private readonly fetchImpl: typeof fetch;
  private readonly token?: string;

  constructor(
    private readonly baseUrl: string,
    options: CurationApiOptions = {},
  ) {
    this.fetchImpl = options.fetchImpl ?? fetch;
    this.token = options.token;
  }

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const headers: Record<string, string> = {
      ...(init.body ? { "content-type": "application/json" } : {}),
      ...(this.token ? { "x-auth-token": this.token } : {}),
    };
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, { ...init, headers });
    } catch (cause) {
      throw new ApiError(0, "unreachable", `service unreachable: ${String(cause)}`);
    }
    if (!response.ok) {
      let code = "error";
      let message = `${response.status}`;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body, keep the status text
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  listDatasets(): Promise<{ datasets: DatasetSummary[] }> {
    return this.request("/v1/datasets");
  }

  createSession(datasetId: string, criteria?: string[]): Promise<SessionSummary> {
    return this.request("/v1/sessions", {
      method: "POST",
      body: JSON.stringify({ dataset_id: datasetId, criteria: criteria ?? null }),
    });
  }

  getSession(sessionId: string): Promise<SessionSummary> {
    return this.request(`/v1/sessions/${encodeURIComponent(sessionId)}`);
  }

  recommendations(sessionId: string, k: number): Promise<Recommendations> {
    return this.request(
      `/v1/sessions/${encodeURIComponent(sessionId)}/recommendations?k=${k}`,
    );
  }

  decide(
    sessionId: string,
    userId: string,
    action: DecisionAction,
    curator = "console",
  ): Promise<SessionSummary> {
    return this.request(`/v1/sessions/${encodeURIComponent(sessionId)}/decisions`, {
      method: "POST",
      body: JSON.stringify({ user_id: userId, action, curator }),
    });
  }

  exportList(sessionId: string): Promise<ExportDocument> {
    return this.request(`/v1/sessions/${encodeURIComponent(sessionId)}/export`);
  }

  cohesion(sessionId: string, randomizations = 150): Promise<CohesionReport> {
    return this.request(
      `/v1/sessions/${encodeURIComponent(sessionId)}/cohesion?randomizations=${randomizations}`,
    );
  }
}
