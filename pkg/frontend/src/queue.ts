import type { AnnotationApi, ApiError } from "./api.js";
import type { VoteAck, VoteSubmission } from "./types.js";

export interface QueueEvents {
  onAck?: (ack: VoteAck) => void;
  onOffline?: (offline: boolean) => void;
}

/**
 * Offline-first vote buffer with a single in-flight flush.
 *
 * Votes are keyed by their idempotency key, so a retry after a network
 * failure resends the same payload and the service acknowledges it
 * without a second effect. A network error keeps everything buffered and
 * flags the session offline; HTTP-level errors (auth, closed batch) are
 * surfaced and not retried.
 */
export class VoteQueue {
  private buffered = new Map<string, VoteSubmission>();
  private inFlight = false;
  private _offline = false;
  private _acked = 0;

  constructor(
    private readonly api: AnnotationApi,
    private readonly events: QueueEvents = {},
  ) {}

  get pending(): number {
    return this.buffered.size;
  }

  get acked(): number {
    return this._acked;
  }

  get offline(): boolean {
    return this._offline;
  }

  /** Buffer one vote; replacing an identical key is a no-op. */
  enqueue(vote: VoteSubmission): void {
    if (!this.buffered.has(vote.idempotency_key)) {
      this.buffered.set(vote.idempotency_key, vote);
    }
  }

  private setOffline(value: boolean): void {
    if (this._offline !== value) {
      this._offline = value;
      this.events.onOffline?.(value);
    }
  }

  /**
   * Push every buffered vote to the service. Resolves true when the
   * buffer drained, false when the network is down (votes stay queued).
   */
  async flush(): Promise<boolean> {
    if (this.inFlight) return false;
    if (this.buffered.size === 0) return true;
    this.inFlight = true;
    try {
      const batch = [...this.buffered.values()];
      let acks: VoteAck[];
      try {
        acks = await this.api.submitVotes(batch);
      } catch (err) {
        if ((err as ApiError).name === "ApiError") {
          throw err; // service rejected the request: do not spin on it
        }
        this.setOffline(true); // network failure: keep the buffer
        return false;
      }
      this.setOffline(false);
      for (const [vote, ack] of batch.map((v, i) => [v, acks[i]] as const)) {
        if (ack === undefined) continue;
        this.buffered.delete(vote.idempotency_key);
        if (ack.status === "ok") this._acked += 1;
        this.events.onAck?.(ack);
      }
      return this.buffered.size === 0;
    } finally {
      this.inFlight = false;
    }
  }
}
