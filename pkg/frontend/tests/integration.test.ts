// @vitest-environment jsdom
/**
 * Board-vs-service acceptance: runs only when a live scenario service is
 * provided via SHOTGAME_SERVICE_URL (e.g. http://127.0.0.1:8031). Verifies
 * that the rendered payoff grid equals the service response field-for-field
 * and that dragging the closest defender out of the block zone yields a
 * response with a zero theory block feature, re-rendered within 500 ms.
 */
import { describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { renderPayoffGrid } from "../src/panel.js";
import { BoardStore } from "../src/state.js";
import type { ScenarioResponse } from "../src/types.js";

declare const process: { env: Record<string, string | undefined> };

const BASE = process.env.SHOTGAME_SERVICE_URL ?? "";
const maybe = BASE ? describe : describe.skip;

function waitForRender(
  renders: ScenarioResponse[],
  count: number,
  timeoutMs: number,
): Promise<void> {
  const t0 = Date.now();
  return new Promise((resolve, reject) => {
    const poll = () => {
      if (renders.length >= count) return resolve();
      if (Date.now() - t0 > timeoutMs) {
        return reject(new Error(`no render after ${timeoutMs} ms`));
      }
      setTimeout(poll, 5);
    };
    poll();
  });
}

maybe("live board consistency", () => {
  const fetchImpl = (input: string, init?: RequestInit) => fetch(input, init);

  it("payoff grid equals the service response field-for-field", async () => {
    const client = new ServiceClient(BASE, fetchImpl);
    const fixture = await client.getFixture("fig6-italy-wales");
    const direct = await client.evaluate(fixture.request);

    const responses: ScenarioResponse[] = [];
    const host = document.createElement("div");
    const store = new BoardStore({
      evaluate: (req, signal) => client.evaluate(req, signal),
      onRender: (s) => {
        // Collect each response once; position-only renders reuse the object.
        if (s.response && s.response !== responses[responses.length - 1]) {
          responses.push(s.response);
          renderPayoffGrid(host, s.response);
        }
      },
    });
    store.loadScenario(fixture.id, fixture.request);
    await waitForRender(responses, 1, 5000);

    for (const key of ["shoot_blocking", "shoot_not_blocking",
                       "pass_blocking", "pass_not_blocking"] as const) {
      const cell = host.querySelector(`td[data-cell="${key}"]`)!;
      expect(Number(cell.textContent)).toBe(direct.payoff_table[key]);
    }
    expect(responses[0].payoff_table).toEqual(direct.payoff_table);
  });

  it("dragging the closest defender out of the zone zeroes the theory feature "
     + "within 500 ms", async () => {
    const client = new ServiceClient(BASE, fetchImpl);
    const fixture = await client.getFixture("fig6-italy-wales");
    const responses: ScenarioResponse[] = [];
    const store = new BoardStore({
      evaluate: (req, signal) => client.evaluate(req, signal),
      onRender: (s) => {
        if (s.response && s.response !== responses[responses.length - 1]) {
          responses.push(s.response);
        }
      },
    });
    store.loadScenario(fixture.id, fixture.request);
    await waitForRender(responses, 1, 5000);
    expect(responses[0].theory_block_feature).toBeGreaterThan(0);

    // Drag every opponent behind the shooter (outside the feasible zone).
    const t0 = Date.now();
    fixture.request.players.forEach((p, i) => {
      if (!p.teammate) {
        store.movePlayer(i, 62, 8);
      }
    });
    store.beginDrag();
    store.endDrag();
    await waitForRender(responses, 2, 500);
    const elapsed = Date.now() - t0;
    const latest = responses[responses.length - 1];
    expect(latest.theory_block_feature).toBe(0);
    expect(elapsed).toBeLessThan(500);
  });
});
