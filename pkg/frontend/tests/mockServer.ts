import type {
  Item,
  MetricsRow,
  VoteAck,
  VoteSubmission,
} from "../src/types.js";
import type { FetchLike } from "../src/api.js";

interface StoredVote {
  verdict: string;
  idempotency_key: string;
}

/**
 * In-memory stand-in for the annotation service, mirroring its contract:
 * items exclude acked votes, votes are exactly-once per title (same
 * verdict acks as idempotent, a different verdict conflicts), progress
 * counts match the vote store. `offline = true` makes every request fail
 * like a dropped connection.
 */
export class MockAnnotationServer {
  offline = false;
  requests: string[] = [];
  iteration = 1;
  metrics: MetricsRow[] = [
    { iteration: 0, accuracy: 0.76, precision: 0.79, recall: 0.52, f1: 0.63 },
  ];
  private votes = new Map<string, StoredVote>();

  constructor(private readonly batch: Item[]) {}

  get voteCount(): number {
    return this.votes.size;
  }

  verdictOf(titleId: string): string | undefined {
    return this.votes.get(titleId)?.verdict;
  }

  private items(n: number): Item[] {
    return this.batch.filter((item) => !this.votes.has(item.title_id)).slice(0, n);
  }

  private submit(votes: VoteSubmission[]): VoteAck[] {
    return votes.map((vote) => {
      if (!this.batch.some((item) => item.title_id === vote.title_id)) {
        return { title_id: vote.title_id, status: "rejected", reason: "not in batch" };
      }
      const existing = this.votes.get(vote.title_id);
      if (existing) {
        if (existing.verdict === vote.verdict) {
          return { title_id: vote.title_id, status: "ok", idempotent: true };
        }
        return { title_id: vote.title_id, status: "conflict" };
      }
      this.votes.set(vote.title_id, {
        verdict: vote.verdict,
        idempotency_key: vote.idempotency_key,
      });
      return { title_id: vote.title_id, status: "ok" };
    });
  }

  /** fetch-compatible entry point for AnnotationApi. */
  fetch: FetchLike = async (input, init) => {
    const url = new URL(input, "http://mock");
    this.requests.push(`${init?.method ?? "GET"} ${url.pathname}`);
    if (this.offline) {
      throw new TypeError("network request failed");
    }
    const json = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { "Content-Type": "application/json" },
      });

    if (url.pathname === "/v1/batch/current") {
      return json({ iteration: this.iteration, batch_size: this.batch.length, open: true });
    }
    if (url.pathname === "/v1/items") {
      return json(this.items(Number(url.searchParams.get("n") ?? "10")));
    }
    if (url.pathname === "/v1/votes") {
      const votes = JSON.parse(String(init?.body ?? "[]")) as VoteSubmission[];
      return json(this.submit(votes));
    }
    if (url.pathname === "/v1/progress") {
      return json({
        iteration: this.iteration,
        batch_size: this.batch.length,
        votes_by_annotator: { "ann-a": this.votes.size },
        complete: this.votes.size === this.batch.length,
        labeled_total: 0,
      });
    }
    if (url.pathname === "/v1/metrics/history") {
      return json(this.metrics);
    }
    return json({ detail: "not found" }, 404);
  };
}

export function makeBatch(n: number): Item[] {
  return Array.from({ length: n }, (_, i) => ({
    title_id: `t${String(i).padStart(4, "0")}`,
    text: `Synthetic headline number ${i}`,
  }));
}
