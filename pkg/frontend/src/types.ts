export type Verdict = "H" | "N";

export interface Item {
  title_id: string;
  text: string;
}

export interface VoteSubmission {
  title_id: string;
  verdict: Verdict;
  idempotency_key: string;
}

export interface VoteAck {
  title_id: string;
  status: "ok" | "rejected" | "conflict";
  idempotent?: boolean;
  reason?: string;
}

export interface BatchInfo {
  iteration: number;
  batch_size: number;
  open: boolean;
}

export interface Progress {
  iteration: number;
  batch_size: number;
  votes_by_annotator: Record<string, number>;
  complete: boolean;
  labeled_total: number;
}

export interface MetricsRow {
  iteration: number;
  accuracy: number;
  precision: number;
  recall: number;
  f1: number;
}

export type Phase = "loading" | "labeling" | "syncing" | "complete" | "error";

/** Snapshot handed to the view layer after every state change. */
export interface UiSessionState {
  phase: Phase;
  iteration: number;
  current: Item | null;
  queueDepth: number;
  votesSubmitted: number;
  pendingVotes: number;
  offline: boolean;
  conflicts: string[];
  metricsHistory: MetricsRow[];
  error?: string;
}

/** Served by the host as a single JSON settings endpoint. */
export interface Settings {
  serviceUrl: string;
  token: string;
}
