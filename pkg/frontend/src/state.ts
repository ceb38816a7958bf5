/**
 * Board state machine: one scenario request, its latest response, and the
 * submission pipeline (debounce, request sequencing, stale-response drop,
 * cancellation, error revert). No scenario math happens here; the service
 * owns every number.
 */

import { ServiceError } from "./api.js";
import type { ScenarioRequest, ScenarioResponse } from "./types.js";

export const DEBOUNCE_MS = 150;
export const PITCH_LENGTH = 120;
export const PITCH_WIDTH = 80;

export type PlayerRef = number | "shooter"; // index into request.players

export interface TimerHandle {
  id: ReturnType<typeof setTimeout>;
}

export interface BoardDeps {
  evaluate: (
    request: ScenarioRequest,
    signal: AbortSignal,
  ) => Promise<ScenarioResponse>;
  onRender: (store: BoardStore) => void;
  setTimer?: (fn: () => void, ms: number) => TimerHandle;
  clearTimer?: (handle: TimerHandle) => void;
}

export function clampToPitch(x: number, y: number): [number, number] {
  return [
    Math.min(Math.max(x, 0), PITCH_LENGTH),
    Math.min(Math.max(y, 0), PITCH_WIDTH),
  ];
}

export class BoardStore {
  request: ScenarioRequest | null = null;
  response: ScenarioResponse | null = null;
  fixtureId: string | null = null;
  dragging = false;
  /** Inline message from a rejected edit (400-class). */
  fieldError: string | null = null;
  /** Set when the service cannot be reached; editing is disabled. */
  serviceDown = false;
  pendingEvaluation = false;

  private seq = 0;
  private appliedSeq = 0;
  private inflight: AbortController | null = null;
  private debounce: TimerHandle | null = null;
  private lastAccepted: ScenarioRequest | null = null;
  private readonly setTimer: (fn: () => void, ms: number) => TimerHandle;
  private readonly clearTimer: (handle: TimerHandle) => void;

  constructor(private readonly deps: BoardDeps) {
    this.setTimer =
      deps.setTimer ?? ((fn, ms) => ({ id: setTimeout(fn, ms) }));
    this.clearTimer = deps.clearTimer ?? ((handle) => clearTimeout(handle.id));
  }

  get editingEnabled(): boolean {
    return this.request !== null && !this.serviceDown;
  }

  /** The next submission's sequence number; monotonically increasing. */
  get sequence(): number {
    return this.seq;
  }

  loadScenario(fixtureId: string | null, request: ScenarioRequest): void {
    this.fixtureId = fixtureId;
    this.request = structuredClone(request);
    this.fieldError = null;
    this.submitNow();
  }

  setRemoveClosest(value: boolean): void {
    if (!this.request) return;
    this.request.options = { ...(this.request.options ?? {}), remove_closest: value };
    this.submitNow();
  }

  /** Position update during a drag: move the marker, no submission yet. */
  movePlayer(ref: PlayerRef, x: number, y: number): void {
    if (!this.request) return;
    const [cx, cy] = clampToPitch(x, y);
    if (ref === "shooter") {
      this.request.shooter.x = cx;
      this.request.shooter.y = cy;
    } else {
      const player = this.request.players[ref];
      if (!player) return;
      player.x = cx;
      player.y = cy;
    }
    this.deps.onRender(this);
  }

  beginDrag(): void {
    this.dragging = true;
  }

  /** Drag-end: clamp happened in movePlayer; submit after the debounce. */
  endDrag(): void {
    this.dragging = false;
    this.scheduleSubmit();
  }

  scheduleSubmit(): void {
    if (this.debounce !== null) {
      this.clearTimer(this.debounce);
    }
    this.debounce = this.setTimer(() => {
      this.debounce = null;
      this.submitNow();
    }, DEBOUNCE_MS);
  }

  submitNow(): void {
    if (!this.request) return;
    if (this.debounce !== null) {
      this.clearTimer(this.debounce);
      this.debounce = null;
    }
    // Supersede any in-flight request: only one lives at a time.
    if (this.inflight) {
      this.inflight.abort();
    }
    const controller = new AbortController();
    this.inflight = controller;
    const mySeq = ++this.seq;
    const snapshot = structuredClone(this.request);
    this.pendingEvaluation = true;
    this.deps.onRender(this);
    this.deps
      .evaluate(snapshot, controller.signal)
      .then((response) => {
        if (mySeq <= this.appliedSeq) {
          return; // stale: a newer response already rendered
        }
        this.appliedSeq = mySeq;
        this.response = response;
        this.lastAccepted = snapshot;
        this.fieldError = null;
        this.serviceDown = false;
        if (this.inflight === controller) {
          this.inflight = null;
          this.pendingEvaluation = false;
        }
        this.deps.onRender(this);
      })
      .catch((err: unknown) => {
        if (controller.signal.aborted) {
          return; // cancelled by a newer submission
        }
        if (this.inflight === controller) {
          this.inflight = null;
          this.pendingEvaluation = false;
        }
        if (err instanceof ServiceError && err.isClientError) {
          // Bad edit: surface the field path and revert to the last state
          // the service accepted.
          this.fieldError = err.message;
          if (this.lastAccepted) {
            this.request = structuredClone(this.lastAccepted);
          }
        } else {
          this.serviceDown = true;
        }
        this.deps.onRender(this);
      });
  }
}
