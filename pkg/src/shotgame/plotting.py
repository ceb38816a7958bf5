"""Deterministic SVG renderings of evaluated shot-taking situations.

SVG keeps plots diffable in tests: same scenario, same bytes. The layout is
a top-down pitch with the feasible block zone, player markers with p_on
labels, and an inset chart of the per-angle block probability.
"""

from __future__ import annotations

from pathlib import Path

from .geometry import PENALTY_CORNER_HIGH, PENALTY_CORNER_LOW

_SCALE = 6.0  # svg px per pitch unit
_W = int(120 * _SCALE)
_H = int(80 * _SCALE)
_CHART_H = 180
_MARGIN = 20

TEAMMATE_COLOR = "#1f6fb2"
OPPONENT_COLOR = "#c23b22"
KEEPER_COLOR = "#e0a500"
SHOOTER_COLOR = "#0b3d91"
ZONE_COLOR = "#9ecae1"


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _px(x: float, y: float) -> tuple[float, float]:
    return x * _SCALE, y * _SCALE


def _pitch_lines() -> list[str]:
    el = [
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#f3f8f3" stroke="#444"/>',
        f'<line x1="{_W / 2}" y1="0" x2="{_W / 2}" y2="{_H}" stroke="#999"/>',
        f'<circle cx="{_W / 2}" cy="{_H / 2}" r="{10 * _SCALE}" fill="none" stroke="#999"/>',
    ]
    # Penalty areas (18 yd box: 18 units deep, y 18..62) and goals.
    for x0, box_x in ((0.0, 18.0), (120.0, 102.0)):
        x_near, _ = _px(min(x0, box_x), 0)
        w = abs(x0 - box_x) * _SCALE
        _, y_top = _px(0, 18)
        el.append(f'<rect x="{x_near}" y="{y_top}" width="{w}" '
                  f'height="{44 * _SCALE}" fill="none" stroke="#999"/>')
    _, y36 = _px(0, 36)
    el.append(f'<rect x="{_W - 4}" y="{y36}" width="4" height="{8 * _SCALE}" fill="#333"/>')
    return el


def _zone(shooter: tuple[float, float]) -> str:
    sx, sy = _px(*shooter)
    lx, ly = _px(*PENALTY_CORNER_LOW)
    hx, hy = _px(*PENALTY_CORNER_HIGH)
    return (f'<polygon points="{_fmt(sx)},{_fmt(sy)} {_fmt(lx)},{_fmt(ly)} '
            f'{_fmt(hx)},{_fmt(hy)}" fill="{ZONE_COLOR}" fill-opacity="0.35" '
            f'stroke="{ZONE_COLOR}"/>')


def _marker(x: float, y: float, color: str, label: str | None = None,
            keeper: bool = False) -> list[str]:
    px, py = _px(x, y)
    shape = (f'<rect x="{_fmt(px - 5)}" y="{_fmt(py - 5)}" width="10" height="10" '
             f'fill="{color}" stroke="#222"/>' if keeper else
             f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="6" fill="{color}" stroke="#222"/>')
    out = [shape]
    if label:
        out.append(f'<text x="{_fmt(px + 8)}" y="{_fmt(py - 8)}" '
                   f'font-size="12" fill="#222">{label}</text>')
    return out


def _curve_chart(curve: list[tuple[float, float]]) -> list[str]:
    top = _H + _MARGIN
    el = [
        f'<rect x="0" y="{top}" width="{_W}" height="{_CHART_H}" fill="#ffffff" stroke="#444"/>',
        f'<text x="8" y="{top + 16}" font-size="12" fill="#222">'
        f'P(block | shot angle)</text>',
    ]
    if len(curve) < 2:
        return el
    n = curve[-1][0]
    pts = []
    for theta, v in curve:
        cx = (theta / n) * (_W - 2 * _MARGIN) + _MARGIN if n > 0 else _MARGIN
        cy = top + _CHART_H - 12 - v * (_CHART_H - 40)
        pts.append(f"{_fmt(cx)},{_fmt(cy)}")
    el.append(f'<polyline points="{" ".join(pts)}" fill="none" '
              f'stroke="{SHOOTER_COLOR}" stroke-width="1.5"/>')
    el.append(f'<text x="{_MARGIN}" y="{top + _CHART_H - 2}" font-size="10" '
              f'fill="#555">0</text>')
    el.append(f'<text x="{_W - _MARGIN - 20}" y="{top + _CHART_H - 2}" '
              f'font-size="10" fill="#555">n={_fmt(n)}</text>')
    return el


def render_scenario_svg(request_doc: dict, response_doc: dict) -> str:
    """Compose the SVG for an evaluated scenario (request + response dicts)."""
    shooter = request_doc["shooter"]
    players = request_doc.get("players", [])
    p_on = {row["attacker_id"]: row["p_on"] for row in response_doc["attackers"]}

    el: list[str] = []
    el.extend(_pitch_lines())
    el.append(_zone((shooter["x"], shooter["y"])))
    for i, p in enumerate(players):
        color = KEEPER_COLOR if p.get("keeper") else (
            TEAMMATE_COLOR if p["teammate"] else OPPONENT_COLOR)
        label = p.get("label") or ""
        if i in p_on:
            label = f"{label} p_on={_fmt(p_on[i])}".strip()
        el.extend(_marker(p["x"], p["y"], color, label or None,
                          keeper=bool(p.get("keeper"))))
    shooter_label = f"shooter p_on={_fmt(p_on[-1])}" if -1 in p_on else "shooter"
    el.extend(_marker(shooter["x"], shooter["y"], SHOOTER_COLOR, shooter_label))
    el.extend(_curve_chart(response_doc.get("theory_block_curve", [])))

    height = _H + _MARGIN + _CHART_H
    body = "\n".join(el)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
            f'height="{height}" viewBox="0 0 {_W} {height}">\n{body}\n</svg>\n')


def plot_scenario(request_doc: dict, response_doc: dict, out: str | Path) -> None:
    Path(out).write_text(render_scenario_svg(request_doc, response_doc))
