/**
 * SVG pitch with draggable markers. Renders in StatsBomb coordinates using
 * the post / penalty-corner constants served by /fixtures, so the client
 * never hardcodes pitch geometry of its own.
 */

import type { BoardStore, PlayerRef } from "./state.js";
import type { PitchMeta } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
export const SCALE = 7; // svg px per pitch unit

function el<K extends string>(
  name: K,
  attrs: Record<string, string | number>,
): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export function pxToPitch(
  svg: SVGSVGElement,
  clientX: number,
  clientY: number,
): [number, number] {
  const rect = svg.getBoundingClientRect();
  const scaleX = rect.width > 0 ? svg.viewBox.baseVal.width / rect.width : 1;
  const scaleY = rect.height > 0 ? svg.viewBox.baseVal.height / rect.height : 1;
  return [
    ((clientX - rect.left) * scaleX) / SCALE,
    ((clientY - rect.top) * scaleY) / SCALE,
  ];
}

export class PitchBoard {
  readonly svg: SVGSVGElement;
  private dragRef: PlayerRef | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly store: BoardStore,
    private readonly pitch: PitchMeta,
  ) {
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    const w = pitch.length * SCALE;
    const h = pitch.width * SCALE;
    this.svg.setAttribute("viewBox", `0 0 ${w} ${h}`);
    this.svg.setAttribute("class", "pitch");
    container.appendChild(this.svg);
    this.svg.addEventListener("pointermove", (ev) => this.onPointerMove(ev));
    this.svg.addEventListener("pointerup", () => this.onPointerUp());
    this.svg.addEventListener("pointerleave", () => this.onPointerUp());
  }

  private onPointerMove(ev: PointerEvent): void {
    if (this.dragRef === null || !this.store.editingEnabled) return;
    const [x, y] = pxToPitch(this.svg, ev.clientX, ev.clientY);
    this.store.movePlayer(this.dragRef, x, y);
  }

  private onPointerUp(): void {
    if (this.dragRef === null) return;
    this.dragRef = null;
    this.store.endDrag();
  }

  private marker(
    ref: PlayerRef,
    x: number,
    y: number,
    cls: string,
    label: string | null,
  ): SVGElement {
    const group = el("g", { class: `marker ${cls}`, "data-ref": String(ref) });
    group.appendChild(el("circle", {
      cx: x * SCALE, cy: y * SCALE, r: 9,
    }));
    if (label) {
      const text = el("text", {
        x: x * SCALE, y: y * SCALE + 4, "text-anchor": "middle",
        class: "marker-label",
      });
      text.textContent = label;
      group.appendChild(text);
    }
    group.addEventListener("pointerdown", (ev) => {
      if (!this.store.editingEnabled) return;
      ev.preventDefault();
      this.dragRef = ref;
      this.store.beginDrag();
    });
    return group;
  }

  render(): void {
    const { pitch } = this;
    this.svg.replaceChildren();
    const w = pitch.length * SCALE;
    const h = pitch.width * SCALE;
    this.svg.appendChild(el("rect", {
      x: 0, y: 0, width: w, height: h, class: "grass",
    }));
    this.svg.appendChild(el("line", {
      x1: w / 2, y1: 0, x2: w / 2, y2: h, class: "pitch-line",
    }));
    const boxTop = pitch.penalty_corner_low[1] * SCALE;
    const boxHeight = (pitch.penalty_corner_high[1] - pitch.penalty_corner_low[1]) * SCALE;
    this.svg.appendChild(el("rect", {
      x: (pitch.length - 18) * SCALE, y: boxTop,
      width: 18 * SCALE, height: boxHeight, class: "pitch-line-box",
    }));
    this.svg.appendChild(el("rect", {
      x: 0, y: boxTop, width: 18 * SCALE, height: boxHeight,
      class: "pitch-line-box",
    }));
    this.svg.appendChild(el("rect", {
      x: w - 3,
      y: pitch.left_post[1] * SCALE,
      width: 3,
      height: (pitch.right_post[1] - pitch.left_post[1]) * SCALE,
      class: "goal",
    }));

    const request = this.store.request;
    if (!request) return;

    // Feasible block zone: shooter to the served penalty-corner constants.
    const sx = request.shooter.x * SCALE;
    const sy = request.shooter.y * SCALE;
    const low = pitch.penalty_corner_low.map((v) => v * SCALE);
    const high = pitch.penalty_corner_high.map((v) => v * SCALE);
    this.svg.appendChild(el("polygon", {
      points: `${sx},${sy} ${low[0]},${low[1]} ${high[0]},${high[1]}`,
      class: "zone",
    }));

    request.players.forEach((p, i) => {
      const cls = p.keeper ? "keeper" : p.teammate ? "teammate" : "opponent";
      this.svg.appendChild(this.marker(i, p.x, p.y, cls, p.label ?? null));
    });
    this.svg.appendChild(this.marker(
      "shooter", request.shooter.x, request.shooter.y, "shooter", "S",
    ));
  }
}
