import type {
  BatchInfo,
  Item,
  MetricsRow,
  Progress,
  VoteAck,
  VoteSubmission,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Thin typed client for the annotation service HTTP API. */
export class AnnotationApi {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      ...init,
      headers: {
        Authorization: `Bearer ${this.token}`,
        "Content-Type": "application/json",
        ...(init?.headers ?? {}),
      },
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  currentBatch(): Promise<BatchInfo> {
    return this.request<BatchInfo>("/v1/batch/current");
  }

  items(n: number): Promise<Item[]> {
    return this.request<Item[]>(`/v1/items?n=${n}`);
  }

  submitVotes(votes: VoteSubmission[]): Promise<VoteAck[]> {
    return this.request<VoteAck[]>("/v1/votes", {
      method: "POST",
      body: JSON.stringify(votes),
    });
  }

  progress(): Promise<Progress> {
    return this.request<Progress>("/v1/progress");
  }

  metricsHistory(): Promise<MetricsRow[]> {
    return this.request<MetricsRow[]>("/v1/metrics/history");
  }
}
