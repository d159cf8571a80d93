/**
 * Analysis client: transport plus the edit-loop request discipline.
 *
 * Every edit asks for a fresh analysis; the client guarantees
 *  - at most MAX_REQUESTS_PER_SECOND requests actually leave (drag events
 *    arrive far faster than that; intermediate states are coalesced away),
 *  - last write wins: a result is delivered only if no newer edit has been
 *    delivered already, so stale in-flight responses are dropped silently.
 *
 * Timing is injected so tests can drive a virtual clock.
 */

import type { AnalysisRequest, AnalysisResult } from "./contract.js";
import { validateRequest } from "./contract.js";

export const MAX_REQUESTS_PER_SECOND = 30;
export const MIN_SPACING_MS = 1000 / MAX_REQUESTS_PER_SECOND;

export type AnalysisTransport = (req: AnalysisRequest) => Promise<AnalysisResult>;

export interface ClientEvents {
  onResult(seq: number, result: AnalysisResult): void;
  onError(seq: number, message: string): void;
}

export interface TimeHooks {
  now(): number;
  setTimer(fn: () => void, ms: number): unknown;
  clearTimer(handle: unknown): void;
}

const realTime: TimeHooks = {
  now: () => Date.now(),
  setTimer: (fn, ms) => setTimeout(fn, ms),
  clearTimer: (h) => clearTimeout(h as ReturnType<typeof setTimeout>),
};

/** POST /analyze against the dev server; non-2xx becomes a thrown Error. */
export function httpTransport(baseUrl: string, fetchFn: typeof fetch = fetch): AnalysisTransport {
  const url = baseUrl.replace(/\/$/, "") + "/analyze";
  return async (req) => {
    const resp = await fetchFn(url, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    const body = (await resp.json()) as AnalysisResult & { error?: string };
    if (!resp.ok) {
      throw new Error(body.error ?? `analysis failed with status ${resp.status}`);
    }
    return body;
  };
}

interface PendingEdit {
  seq: number;
  request: AnalysisRequest;
}

export class AnalysisClient {
  private seqCounter = 0;
  private lastDispatchTime = -Infinity;
  private lastDeliveredSeq = 0;
  private pending: PendingEdit | null = null;
  private timer: unknown = null;
  private dispatchCount = 0;

  constructor(
    private readonly transport: AnalysisTransport,
    private readonly events: ClientEvents,
    private readonly time: TimeHooks = realTime,
  ) {}

  /** Total requests that actually reached the transport (for tests/metrics). */
  get dispatched(): number {
    return this.dispatchCount;
  }

  /**
   * Queue an analysis for the current edit state. Returns the edit sequence
   * number; invalid requests are reported through onError without a network
   * trip and still consume a sequence number (they supersede older edits).
   */
  request(req: AnalysisRequest): number {
    const seq = ++this.seqCounter;
    const problem = validateRequest(req);
    if (problem !== null) {
      this.dropPending();
      this.deliverError(seq, problem);
      return seq;
    }
    this.pending = { seq, request: req };
    this.schedule();
    return seq;
  }

  private dropPending(): void {
    this.pending = null;
    if (this.timer !== null) {
      this.time.clearTimer(this.timer);
      this.timer = null;
    }
  }

  private schedule(): void {
    if (this.timer !== null) return; // a dispatch is already due
    const wait = this.lastDispatchTime + MIN_SPACING_MS - this.time.now();
    if (wait <= 0) {
      this.dispatchPending();
    } else {
      this.timer = this.time.setTimer(() => {
        this.timer = null;
        this.dispatchPending();
      }, wait);
    }
  }

  private dispatchPending(): void {
    const edit = this.pending;
    if (edit === null) return;
    this.pending = null;
    this.lastDispatchTime = this.time.now();
    this.dispatchCount += 1;
    this.transport(edit.request).then(
      (result) => this.deliverResult(edit.seq, result),
      (err: unknown) => this.deliverError(edit.seq, err instanceof Error ? err.message : String(err)),
    );
  }

  private deliverResult(seq: number, result: AnalysisResult): void {
    if (seq <= this.lastDeliveredSeq) return; // superseded; drop
    this.lastDeliveredSeq = seq;
    this.events.onResult(seq, result);
  }

  private deliverError(seq: number, message: string): void {
    if (seq <= this.lastDeliveredSeq) return;
    this.lastDeliveredSeq = seq;
    this.events.onError(seq, message);
  }
}
