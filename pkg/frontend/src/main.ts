/** Wires the board, panel, and service client together. */

import { ServiceClient } from "./api.js";
import { PitchBoard } from "./board.js";
import {
  renderAttackerTable,
  renderBlockCurve,
  renderPayoffGrid,
  renderSummary,
} from "./panel.js";
import { BoardStore } from "./state.js";

async function start(): Promise<void> {
  const client = new ServiceClient("");
  const pitchHost = document.getElementById("pitch")!;
  const banner = document.getElementById("banner")!;
  const fieldError = document.getElementById("field-error")!;
  const table = document.getElementById("attackers") as HTMLTableElement;
  const payoff = document.getElementById("payoff")!;
  const summary = document.getElementById("summary")!;
  const curve = document.getElementById("curve") as unknown as SVGSVGElement;
  const picker = document.getElementById("fixture-picker") as HTMLSelectElement;
  const removeToggle = document.getElementById("remove-closest") as HTMLInputElement;

  let board: PitchBoard | null = null;

  const store = new BoardStore({
    evaluate: (request, signal) => client.evaluate(request, signal),
    onRender: (s) => {
      banner.hidden = !s.serviceDown;
      fieldError.textContent = s.fieldError ?? "";
      fieldError.hidden = !s.fieldError;
      document.body.classList.toggle("disabled", !s.editingEnabled);
      board?.render();
      if (s.response) {
        renderAttackerTable(table, s.response);
        renderPayoffGrid(payoff, s.response);
        renderBlockCurve(curve, s.response.theory_block_curve);
        renderSummary(summary, s.response);
      }
    },
  });

  removeToggle.addEventListener("change", () => {
    store.setRemoveClosest(removeToggle.checked);
  });

  let listing;
  try {
    listing = await client.listFixtures();
  } catch {
    banner.hidden = false;
    document.body.classList.add("disabled");
    return;
  }

  board = new PitchBoard(pitchHost, store, listing.pitch);

  for (const fixture of listing.fixtures) {
    const option = document.createElement("option");
    option.value = fixture.id;
    option.textContent = fixture.title;
    picker.appendChild(option);
  }

  const loadFixture = async (id: string) => {
    const fixture = await client.getFixture(id);
    removeToggle.checked = Boolean(fixture.request.options?.remove_closest);
    store.loadScenario(fixture.id, fixture.request);
  };

  picker.addEventListener("change", () => void loadFixture(picker.value));
  if (listing.fixtures.length > 0) {
    picker.value = listing.fixtures[0].id;
    await loadFixture(picker.value);
  }
}

void start();
