import { AnnotationApi } from "./api.js";
import { VoteQueue } from "./queue.js";
import type { Item, UiSessionState, Verdict } from "./types.js";

export interface SessionOptions {
  /** Items fetched per refill request. */
  prefetch?: number;
  /** Keypresses within this window after a vote are dropped. */
  debounceMs?: number;
  now?: () => number;
}

/**
 * Drives the label flow: fetch -> display -> vote -> optimistic advance ->
 * ack reconcile. One title is in focus at a time; a skip moves it to the
 * end of the personal queue; every vote produces exactly one durable
 * submission keyed by (iteration, title), so retries cannot double-count.
 */
export class LabelSession {
  private queue: Item[] = [];
  private current: Item | null = null;
  private iteration = 0;
  private batchSize = 0;
  private phase: UiSessionState["phase"] = "loading";
  private conflicts: string[] = [];
  private metricsHistory: UiSessionState["metricsHistory"] = [];
  private handled = new Set<string>(); // voted or skipped-and-requeued ids
  private lastVoteAt = -Infinity;
  private error?: string;
  private listeners: Array<(state: UiSessionState) => void> = [];
  private votes: VoteQueue;
  private readonly prefetch: number;
  private readonly debounceMs: number;
  private readonly now: () => number;

  constructor(
    private readonly api: AnnotationApi,
    options: SessionOptions = {},
  ) {
    this.prefetch = options.prefetch ?? 10;
    this.debounceMs = options.debounceMs ?? 250;
    this.now = options.now ?? (() => Date.now());
    this.votes = new VoteQueue(api, {
      onAck: (ack) => {
        if (ack.status === "conflict" || ack.status === "rejected") {
          this.conflicts.push(ack.title_id);
        }
        this.emit();
      },
      onOffline: () => this.emit(),
    });
  }

  onChange(listener: (state: UiSessionState) => void): void {
    this.listeners.push(listener);
  }

  state(): UiSessionState {
    return {
      phase: this.phase,
      iteration: this.iteration,
      current: this.current,
      queueDepth: this.queue.length + (this.current ? 1 : 0),
      votesSubmitted: this.votes.acked,
      pendingVotes: this.votes.pending,
      offline: this.votes.offline,
      conflicts: [...this.conflicts],
      metricsHistory: this.metricsHistory,
      error: this.error,
    };
  }

  private emit(): void {
    const snapshot = this.state();
    for (const listener of this.listeners) listener(snapshot);
  }

  private voteKey(titleId: string): string {
    return `it${this.iteration}:${titleId}`;
  }

  async start(): Promise<void> {
    try {
      const batch = await this.api.currentBatch();
      this.iteration = batch.iteration;
      this.batchSize = batch.batch_size;
      await this.refill();
      this.advance();
      this.phase = this.current ? "labeling" : "complete";
      if (this.phase === "complete") await this.loadCompletion();
    } catch (err) {
      this.phase = "error";
      this.error = (err as Error).message;
    }
    this.emit();
  }

  private async refill(): Promise<void> {
    let items: Item[];
    try {
      items = await this.api.items(this.prefetch);
    } catch {
      return; // offline: keep labeling what is buffered locally
    }
    for (const item of items) {
      // the service only filters acked votes; skip anything voted locally
      if (this.handled.has(item.title_id)) continue;
      if (this.queue.some((queued) => queued.title_id === item.title_id)) continue;
      if (this.current?.title_id === item.title_id) continue;
      this.queue.push(item);
    }
  }

  private advance(): void {
    this.current = this.queue.shift() ?? null;
  }

  /** Record a verdict for the focused title and advance optimistically. */
  async vote(verdict: Verdict): Promise<void> {
    if (this.phase !== "labeling" || this.current === null) return;
    const at = this.now();
    if (at - this.lastVoteAt < this.debounceMs) return; // double-keypress
    this.lastVoteAt = at;

    const item = this.current;
    this.handled.add(item.title_id);
    this.votes.enqueue({
      title_id: item.title_id,
      verdict,
      idempotency_key: this.voteKey(item.title_id),
    });
    this.advance();
    this.emit();

    await this.votes.flush();
    if (this.queue.length < Math.max(2, this.prefetch / 2)) {
      await this.refill();
      if (this.current === null) this.advance();
    }
    if (this.current === null && this.queue.length === 0) {
      await this.finishIfDone();
    }
    this.emit();
  }

  /** Put the focused title at the end of the personal queue. */
  skip(): void {
    if (this.phase !== "labeling" || this.current === null) return;
    this.queue.push(this.current);
    this.advance();
    this.emit();
  }

  /** Flush buffered votes (call when connectivity returns). */
  async sync(): Promise<void> {
    await this.votes.flush();
    const stalled =
      (this.phase === "labeling" || this.phase === "syncing") &&
      this.current === null;
    if (stalled) {
      await this.refill();
      this.advance();
      if (this.current !== null) {
        this.phase = "labeling";
      } else if (this.queue.length === 0) {
        await this.finishIfDone();
      }
    }
    this.emit();
  }

  private async finishIfDone(): Promise<void> {
    if (this.votes.pending > 0) {
      this.phase = "syncing";
      return;
    }
    // the server may still hold unseen items (e.g. skipped fetches)
    await this.refill();
    if (this.queue.length > 0) {
      this.advance();
      return;
    }
    this.phase = "complete";
    await this.loadCompletion();
  }

  private async loadCompletion(): Promise<void> {
    try {
      this.metricsHistory = await this.api.metricsHistory();
    } catch {
      this.metricsHistory = [];
    }
  }

  /** Expose progress for the completion bar; parity-checked in tests. */
  async progress() {
    return this.api.progress();
  }
}
