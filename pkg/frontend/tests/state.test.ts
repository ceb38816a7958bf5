import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ServiceError } from "../src/api.js";
import { BoardStore, DEBOUNCE_MS, clampToPitch } from "../src/state.js";
import type { ScenarioRequest, ScenarioResponse } from "../src/types.js";
import { sampleRequest, sampleResponse } from "./helpers.js";

interface Deferred {
  request: ScenarioRequest;
  resolve: (r: ScenarioResponse) => void;
  reject: (e: unknown) => void;
  signal: AbortSignal;
}

function makeStore() {
  const calls: Deferred[] = [];
  const renders: number[] = [];
  const store = new BoardStore({
    evaluate: (request, signal) =>
      new Promise<ScenarioResponse>((resolve, reject) => {
        calls.push({ request, resolve, reject, signal });
      }),
    onRender: () => renders.push(Date.now()),
  });
  return { store, calls, renders };
}

function flush(): Promise<void> {
  return new Promise((resolve) => {
    setTimeout(resolve, 0);
    vi.advanceTimersByTime(0);
  });
}

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("clamping", () => {
  it("clamps out-of-bounds drops to the pitch boundary", () => {
    expect(clampToPitch(130, -5)).toEqual([120, 0]);
    expect(clampToPitch(-2, 91)).toEqual([0, 80]);
    expect(clampToPitch(60, 40)).toEqual([60, 40]);
  });

  it("applies the clamp when moving a player", () => {
    const { store, calls } = makeStore();
    store.loadScenario("fx", sampleRequest());
    store.movePlayer(0, 500, 500);
    expect(store.request!.players[0].x).toBe(120);
    expect(store.request!.players[0].y).toBe(80);
    store.movePlayer("shooter", -10, 40);
    expect(store.request!.shooter.x).toBe(0);
    expect(calls.length).toBe(1); // moves alone never submit
  });
});

describe("debounced submission", () => {
  it("submits once after the debounce window on drag end", () => {
    const { store, calls } = makeStore();
    store.loadScenario("fx", sampleRequest());
    expect(calls.length).toBe(1); // initial load submits immediately

    store.beginDrag();
    store.movePlayer(0, 100, 40);
    store.endDrag();
    expect(calls.length).toBe(1);
    vi.advanceTimersByTime(DEBOUNCE_MS - 1);
    expect(calls.length).toBe(1);
    vi.advanceTimersByTime(1);
    expect(calls.length).toBe(2);
    expect(calls[1].request.players[0].x).toBe(100);
  });

  it("collapses a rapid drop sequence into one request for the last drop", () => {
    const { store, calls } = makeStore();
    store.loadScenario("fx", sampleRequest());
    for (let i = 0; i < 10; i++) {
      store.beginDrag();
      store.movePlayer(0, 100 + i, 40);
      store.endDrag();
      vi.advanceTimersByTime(50); // within the debounce window
    }
    vi.advanceTimersByTime(DEBOUNCE_MS);
    expect(calls.length).toBe(2);
    expect(calls[1].request.players[0].x).toBe(109);
  });
});

describe("request sequencing", () => {
  it("drops out-of-order responses by sequence number", async () => {
    const { store, calls } = makeStore();
    store.loadScenario("fx", sampleRequest());
    store.submitNow();
    expect(calls.length).toBe(2);
    const newer = sampleResponse();
    newer.xsot = 0.42;
    calls[1].resolve(newer);
    await vi.advanceTimersByTimeAsync(0);
    const older = sampleResponse();
    older.xsot = 0.01;
    calls[0].resolve(older); // transport ignored the cancellation
    await vi.advanceTimersByTimeAsync(0);
    expect(store.response!.xsot).toBe(0.42);
  });

  it("aborts the superseded in-flight request", () => {
    const { store, calls } = makeStore();
    store.loadScenario("fx", sampleRequest());
    expect(calls[0].signal.aborted).toBe(false);
    store.submitNow();
    expect(calls[0].signal.aborted).toBe(true);
    expect(calls[1].signal.aborted).toBe(false);
    expect(store.sequence).toBe(2);
  });
});

describe("error handling", () => {
  it("400-class errors set the field message and revert the edit", async () => {
    const { store, calls } = makeStore();
    store.loadScenario("fx", sampleRequest());
    calls[0].resolve(sampleResponse());
    await vi.advanceTimersByTimeAsync(0);

    store.movePlayer(0, 119, 12);
    store.submitNow();
    calls[1].reject(new ServiceError("players.0.x: out of bounds", 422,
                                     "players.0.x"));
    await vi.advanceTimersByTimeAsync(0);
    expect(store.fieldError).toContain("players.0.x");
    // Board reverted to the last accepted request.
    expect(store.request!.players[0].x).toBe(115);
    expect(store.serviceDown).toBe(false);
  });

  it("transport failures raise the banner and disable editing", async () => {
    const { store, calls } = makeStore();
    store.loadScenario("fx", sampleRequest());
    calls[0].reject(new TypeError("fetch failed"));
    await vi.advanceTimersByTimeAsync(0);
    expect(store.serviceDown).toBe(true);
    expect(store.editingEnabled).toBe(false);
  });

  it("a later success clears the banner", async () => {
    const { store, calls } = makeStore();
    store.loadScenario("fx", sampleRequest());
    calls[0].reject(new TypeError("fetch failed"));
    await vi.advanceTimersByTimeAsync(0);
    store.submitNow();
    calls[1].resolve(sampleResponse());
    await vi.advanceTimersByTimeAsync(0);
    expect(store.serviceDown).toBe(false);
    expect(store.editingEnabled).toBe(true);
  });
});

describe("options", () => {
  it("remove-closest toggle resubmits with the option set", () => {
    const { store, calls } = makeStore();
    store.loadScenario("fx", sampleRequest());
    store.setRemoveClosest(true);
    expect(calls.length).toBe(2);
    expect(calls[1].request.options?.remove_closest).toBe(true);
  });
});
