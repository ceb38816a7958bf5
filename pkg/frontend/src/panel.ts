/**
 * Side panel: per-attacker probability table, the 2x2 payoff grid with the
 * equilibrium cells highlighted, and the block-probability-vs-angle chart.
 * Every number is copied verbatim from the service response.
 */

import type { AttackerRow, NashSolution, ScenarioResponse } from "./types.js";

function fmt(v: number | null | undefined): string {
  return v === null || v === undefined ? "-" : v.toFixed(2);
}

function rowName(row: AttackerRow): string {
  if (row.attacker_id === -1) return "shooter";
  return row.label ?? String(row.attacker_id);
}

export function renderAttackerTable(
  table: HTMLTableElement,
  response: ScenarioResponse,
): void {
  const head = `<thead><tr>
    <th>attacker</th><th>P(on)</th><th>P(off)</th><th>P(block)</th><th>P(control)</th>
  </tr></thead>`;
  const body = response.attackers
    .map((row) => `<tr data-attacker="${row.attacker_id}"${
      row.attacker_id === response.best_pass_target ? ' class="best-target"' : ""
    }>
      <td>${rowName(row)}</td>
      <td data-col="p_on">${fmt(row.p_on)}</td>
      <td data-col="p_off">${fmt(row.p_off)}</td>
      <td data-col="p_block">${fmt(row.p_block)}</td>
      <td data-col="p_control">${fmt(row.p_control)}</td>
    </tr>`)
    .join("");
  table.innerHTML = `${head}<tbody>${body}</tbody>`;
}

const CELLS: [keyof ScenarioResponse["payoff_table"], string, string][] = [
  ["shoot_blocking", "shoot", "blocking"],
  ["shoot_not_blocking", "shoot", "not_blocking"],
  ["pass_blocking", "pass", "blocking"],
  ["pass_not_blocking", "pass", "not_blocking"],
];

function equilibriumCells(nash: NashSolution): Set<string> {
  return new Set(nash.pure.map(([row, col]) => `${row}/${col}`));
}

export function renderPayoffGrid(
  container: HTMLElement,
  response: ScenarioResponse,
): void {
  const highlight = equilibriumCells(response.nash);
  const cellHtml = (key: (typeof CELLS)[number][0], row: string, col: string) => {
    const value = response.payoff_table[key];
    const isEq = highlight.has(`${row}/${col}`);
    return `<td data-cell="${key}"${isEq ? ' class="equilibrium"' : ""}>
      ${value.toFixed(6)}</td>`;
  };
  let mixedNote = "";
  if (response.nash.mixed) {
    const m = response.nash.mixed;
    mixedNote = `<p class="mixed-note">mixed: shoot ${fmt(m.p_shoot)},
      block ${fmt(m.q_block)}, value ${m.value.toFixed(4)}</p>`;
  }
  container.innerHTML = `<table class="payoff">
    <thead><tr><th></th><th>blocking</th><th>not blocking</th></tr></thead>
    <tbody>
      <tr><th>shoot</th>${cellHtml("shoot_blocking", "shoot", "blocking")}
          ${cellHtml("shoot_not_blocking", "shoot", "not_blocking")}</tr>
      <tr><th>pass</th>${cellHtml("pass_blocking", "pass", "blocking")}
          ${cellHtml("pass_not_blocking", "pass", "not_blocking")}</tr>
    </tbody>
  </table>${mixedNote}`;
}

export function renderBlockCurve(
  svg: SVGSVGElement,
  curve: [number, number][],
): void {
  const W = 360;
  const H = 140;
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.replaceChildren();
  const frame = document.createElementNS(svg.namespaceURI, "rect");
  frame.setAttribute("x", "0");
  frame.setAttribute("y", "0");
  frame.setAttribute("width", String(W));
  frame.setAttribute("height", String(H));
  frame.setAttribute("class", "chart-frame");
  svg.appendChild(frame);
  if (curve.length < 2) return;
  const n = curve[curve.length - 1][0];
  const points = curve
    .map(([theta, p]) => {
      const cx = n > 0 ? (theta / n) * (W - 20) + 10 : 10;
      const cy = H - 10 - p * (H - 30);
      return `${cx.toFixed(1)},${cy.toFixed(1)}`;
    })
    .join(" ");
  const line = document.createElementNS(svg.namespaceURI, "polyline");
  line.setAttribute("points", points);
  line.setAttribute("class", "chart-line");
  svg.appendChild(line);
}

export function renderSummary(
  container: HTMLElement,
  response: ScenarioResponse,
): void {
  container.innerHTML = `
    <span data-field="xsot">xSOT ${response.xsot.toFixed(4)}</span>
    <span data-field="xosot">xOSOT ${response.xosot.toFixed(4)}</span>
    <span data-field="theory">theory block ${response.theory_block_feature.toFixed(4)}</span>`;
}
