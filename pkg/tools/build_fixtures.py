#!/usr/bin/env python3
"""Regenerate the vendored fixtures: the synthetic 200-shot corpus, the
bundled scenario files, reference tables, and the pretrained model files.

Everything is seeded, so reruns reproduce the committed artifacts exactly.
The corpus mimics the StatsBomb open-data layout (events/<match_id>.json,
three-sixty/<match_id>.json). Outcomes are sampled from a generative process
that mixes the shipped theory block model with shooter-geometry terms, so the
directional model comparisons on this corpus behave like they do on real
data: the theory feature helps, but geometry carries signal of its own.
"""

from __future__ import annotations

import json
import math
import sys
import uuid
from dataclasses import replace
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from shotgame.block_theory import DEFAULT_PARAMS, shot_block_probability
from shotgame.features import RoleVocab, build_features_block, build_features_off
from shotgame.geometry import ang2goal, dist2goal
from shotgame.ingest import (FreezeFrame, PlayerSnapshot, load_events,
                             load_freeze_frames, split_dataset)
from shotgame.nnet import BLOCK_MODEL_CONFIG, OFF_MODEL_CONFIG, train_mlp

CORPUS_DIR = REPO / "fixtures" / "corpus"
RESOURCES = REPO / "src" / "shotgame" / "resources"

SEED = 20240817
N_MATCHES = 10
SHOTS_PER_MATCH = 20
FRAME_COVERAGE = 0.85

TEAMS = [
    (901, "Northfield"), (902, "Eastport"), (903, "Southgate"),
    (904, "Westbrook"), (905, "Lakeland"), (906, "Riverton"),
    (907, "Hillcrest"), (908, "Baymouth"),
]

ROLES = [
    ("Center Forward", 22), ("Left Wing", 10), ("Right Wing", 10),
    ("Center Attacking Midfield", 10), ("Left Center Forward", 5),
    ("Right Center Forward", 5), ("Left Center Midfield", 7),
    ("Right Center Midfield", 7), ("Center Defensive Midfield", 5),
    ("Left Back", 3), ("Right Back", 3), ("Left Midfield", 4),
    ("Right Midfield", 4), ("Secondary Striker", 2),
    ("Left Center Back", 2), ("Right Center Back", 1),
]

ON_NAMES = [("Goal", 0.28), ("Saved", 0.72)]
OFF_NAMES = [("Off T", 0.58), ("Wayward", 0.20), ("Post", 0.11),
             ("Saved Off Target", 0.11)]


def _choice(rng, weighted):
    names = [n for n, _ in weighted]
    w = np.array([w for _, w in weighted], dtype=float)
    return names[rng.choice(len(names), p=w / w.sum())]


def _sigmoid(z: float) -> float:
    return 1.0 / (1.0 + math.exp(-z))


def _event_uuid(match_id: int, index: int) -> str:
    return str(uuid.uuid5(uuid.NAMESPACE_URL, f"shotgame/{match_id}/{index}"))


def sample_frame(rng, shooter_xy):
    """Plausible freeze frame around one shot: keeper, defenders, teammates."""
    sx, sy = shooter_xy
    players = [PlayerSnapshot(
        x=float(np.clip(sx + rng.uniform(-0.4, 0.4), 0.5, 119.4)),
        y=float(np.clip(sy + rng.uniform(-0.4, 0.4), 0.5, 79.5)),
        teammate=True, actor=True, keeper=False)]
    players.append(PlayerSnapshot(
        x=float(np.clip(rng.normal(118.6, 0.7), 114.0, 119.8)),
        y=float(np.clip(40 + 0.45 * (sy - 40) + rng.normal(0, 1.5), 28.0, 52.0)),
        teammate=False, actor=False, keeper=True))
    # Defenders cluster on the ball cone, the way real frames look at a shot.
    n_cone = min(int(rng.poisson(1.4)), 5)
    for _ in range(n_cone):
        t = rng.uniform(0.08, 0.55)
        bx = sx + t * (120.0 - sx)
        by = sy + t * (40.0 - sy)
        players.append(PlayerSnapshot(
            x=float(np.clip(bx + rng.normal(0, 0.8), 60.0, 119.6)),
            y=float(np.clip(by + rng.normal(0, 1.2 + 2.5 * t), 1.0, 79.0)),
            teammate=False, actor=False, keeper=False))
    for _ in range(min(int(rng.poisson(0.8)), 3)):
        players.append(PlayerSnapshot(
            x=float(rng.uniform(62.0, 98.0)), y=float(rng.uniform(4.0, 76.0)),
            teammate=False, actor=False, keeper=False))
    for _ in range(min(int(rng.poisson(2.4)), 6)):
        tx = float(rng.uniform(90.0, 119.0))
        ty = float(rng.uniform(8.0, 72.0))
        if abs(tx - sx) < 1.5 and abs(ty - sy) < 1.5:
            ty = float(np.clip(ty + 6.0, 8.0, 72.0))
        players.append(PlayerSnapshot(x=tx, y=ty, teammate=True,
                                      actor=False, keeper=False))
    return FreezeFrame(event_id="pending", players=tuple(players))


def sample_outcome(rng, shooter_xy, frame):
    """Outcome probabilities mix the theory block value with geometry terms."""
    dist = dist2goal(shooter_xy)
    ang = ang2goal(shooter_xy)
    theory = shot_block_probability(shooter_xy, frame, DEFAULT_PARAMS)
    p_block = _sigmoid(-1.85 + 7.0 * theory - 0.025 * (dist - 16.0))
    p_off = _sigmoid(-0.45 + 0.085 * (dist - 16.0) + 0.9 * ang)
    u = rng.random()
    if u < p_block:
        return "Blocked"
    if rng.random() < p_off:
        return _choice(rng, OFF_NAMES)
    return _choice(rng, ON_NAMES)


def build_corpus() -> None:
    rng = np.random.default_rng(SEED)
    events_dir = CORPUS_DIR / "events"
    frames_dir = CORPUS_DIR / "three-sixty"
    events_dir.mkdir(parents=True, exist_ok=True)
    frames_dir.mkdir(parents=True, exist_ok=True)

    role_names = [r for r, _ in ROLES]
    role_w = np.array([w for _, w in ROLES], dtype=float)
    role_w /= role_w.sum()

    outcome_counts: dict[str, int] = {}
    for m in range(N_MATCHES):
        match_id = 7001 + m
        home, away = TEAMS[(2 * m) % len(TEAMS)], TEAMS[(2 * m + 1) % len(TEAMS)]
        events = []
        frames = []
        index = 1
        for k in range(SHOTS_PER_MATCH):
            team = home if rng.random() < 0.5 else away
            # A sprinkling of non-shot events keeps the parser honest.
            if rng.random() < 0.3:
                events.append({
                    "id": _event_uuid(match_id, index), "index": index,
                    "period": 1 if index < 60 else 2,
                    "type": {"id": 30, "name": "Pass"},
                    "team": {"id": team[0], "name": team[1]},
                    "location": [float(rng.uniform(20, 100)),
                                 float(rng.uniform(5, 75))],
                })
                index += 1
            sx = float(np.clip(120.0 - abs(rng.normal(0.0, 13.0)), 88.0, 119.2))
            sy = float(np.clip(rng.normal(40.0, 12.0), 8.0, 72.0))
            frame = None
            if rng.random() < FRAME_COVERAGE:
                frame = sample_frame(rng, (sx, sy))
            outcome = sample_outcome(rng, (sx, sy), frame)
            outcome_counts[outcome] = outcome_counts.get(outcome, 0) + 1
            event_id = _event_uuid(match_id, index)
            events.append({
                "id": event_id, "index": index,
                "period": 1 if k < SHOTS_PER_MATCH // 2 else 2,
                "type": {"id": 16, "name": "Shot"},
                "team": {"id": team[0], "name": team[1]},
                "position": {"name": role_names[rng.choice(len(role_names), p=role_w)]},
                "location": [sx, sy],
                "shot": {"outcome": {"name": outcome}},
            })
            if frame is not None:
                frames.append({
                    "event_uuid": event_id,
                    "freeze_frame": [
                        {"location": [p.x, p.y], "teammate": p.teammate,
                         "actor": p.actor, "keeper": p.keeper}
                        for p in frame.players],
                })
            index += 1

        # Edge cases the loaders must handle: a shoot-out shot (dropped) and
        # one Saved to Post (grouped Removed, dropped) in the first match.
        if m == 0:
            events.append({
                "id": _event_uuid(match_id, 900), "index": 900, "period": 5,
                "type": {"id": 16, "name": "Shot"},
                "team": {"id": home[0], "name": home[1]},
                "position": {"name": "Center Forward"},
                "location": [108.0, 40.0],
                "shot": {"outcome": {"name": "Goal"}},
            })
            events.append({
                "id": _event_uuid(match_id, 901), "index": 901, "period": 2,
                "type": {"id": 16, "name": "Shot"},
                "team": {"id": away[0], "name": away[1]},
                "position": {"name": "Left Wing"},
                "location": [110.0, 35.0],
                "shot": {"outcome": {"name": "Saved to Post"}},
            })
        (events_dir / f"{match_id}.json").write_text(json.dumps(events, indent=1))
        (frames_dir / f"{match_id}.json").write_text(json.dumps(frames, indent=1))
    print(f"corpus: {sum(outcome_counts.values())} shots "
          f"(+2 dropped edge cases): {outcome_counts}")


FIG4_SCENARIO = {
    "shooter": {"role": "Left Wing", "x": 103.8, "y": 34.5},
    "players": [
        {"x": 108.5, "y": 36.0, "teammate": False, "keeper": False, "label": "19"},
        {"x": 112.0, "y": 38.5, "teammate": False, "keeper": False, "label": "13"},
        {"x": 100.0, "y": 30.0, "teammate": False, "keeper": False, "label": "8"},
        {"x": 118.8, "y": 38.5, "teammate": False, "keeper": True, "label": "21"},
        {"x": 108.0, "y": 50.0, "teammate": True, "keeper": False, "label": "7"},
        {"x": 98.5, "y": 22.0, "teammate": True, "keeper": False, "label": "11"},
        {"x": 96.0, "y": 44.0, "teammate": True, "keeper": False, "label": "10"},
    ],
    "options": {"remove_closest": False},
}

FIG6_SCENARIO = {
    "shooter": {"role": "Center Attacking Midfield", "x": 104.0, "y": 42.0},
    "players": [
        {"x": 115.0, "y": 33.0, "teammate": True, "keeper": False, "label": "9"},
        {"x": 94.5, "y": 31.0, "teammate": True, "keeper": False, "label": "20"},
        {"x": 92.0, "y": 54.0, "teammate": True, "keeper": False, "label": "14"},
        {"x": 106.5, "y": 55.0, "teammate": True, "keeper": False, "label": "12"},
        {"x": 109.0, "y": 29.0, "teammate": True, "keeper": False, "label": "6"},
        {"x": 114.5, "y": 48.5, "teammate": True, "keeper": False, "label": "8"},
        {"x": 107.5, "y": 41.5, "teammate": False, "keeper": False, "label": "d1"},
        {"x": 107.5, "y": 27.5, "teammate": False, "keeper": False, "label": "d2"},
        {"x": 111.9, "y": 54.0, "teammate": False, "keeper": False, "label": "d3"},
        {"x": 99.5, "y": 25.0, "teammate": False, "keeper": False, "label": "d4"},
        {"x": 118.9, "y": 40.3, "teammate": False, "keeper": True, "label": "gk"},
    ],
    "options": {"remove_closest": False},
}


def build_resources() -> None:
    scen_dir = RESOURCES / "scenarios"
    scen_dir.mkdir(parents=True, exist_ok=True)
    (scen_dir / "fig4_spain_italy.json").write_text(
        json.dumps(FIG4_SCENARIO, indent=1))
    (scen_dir / "fig6_italy_wales.json").write_text(
        json.dumps(FIG6_SCENARIO, indent=1))
    (scen_dir / "index.json").write_text(json.dumps({
        "fixtures": [
            {"id": "fig4-spain-italy", "title": "Spain vs Italy (EURO 2020)",
             "description": "Two defenders in the block zone; the nearer one "
                            "gets the first chance to block.",
             "file": "fig4_spain_italy.json"},
            {"id": "fig6-italy-wales", "title": "Italy vs Wales (EURO 2020)",
             "description": "Shooter under pressure with six off-ball "
                            "teammates; pass options dominate.",
             "file": "fig6_italy_wales.json"},
        ]
    }, indent=1))

    (RESOURCES / "theory_params.json").write_text(json.dumps({
        "c1": 36.9463, "c2": 12.3579, "c3": 0.4998, "c4": 0.1577,
        "a": -2.3098, "version": 1}, indent=1))

    (RESOURCES / "contingency_table12.json").write_text(json.dumps({
        "rows": ["Off", "On", "Block"],
        "cols": ["Off", "On", "Block"],
        "counts": [[427, 341, 275], [343, 286, 220], [273, 222, 187]],
    }, indent=1))

    tables = [
        ("Argentina", "Final", 2.14, 1.76), ("Australia", "Round of 16", 1.00, 0.74),
        ("Belgium", "Group Stage", 0.33, 1.37), ("Brazil", "Quarter-finals", 1.60, 2.44),
        ("Cameroon", "Group Stage", 1.33, 1.37), ("Canada", "Group Stage", 0.67, 1.31),
        ("Costa Rica", "Group Stage", 1.00, 0.56), ("Croatia", "3rd Place Final", 1.14, 1.40),
        ("Denmark", "Group Stage", 0.33, 1.62), ("Ecuador", "Group Stage", 1.33, 1.33),
        ("England", "Quarter-finals", 2.60, 1.77), ("France", "Final", 2.29, 1.91),
        ("Germany", "Group Stage", 2.00, 2.87), ("Ghana", "Group Stage", 1.67, 1.04),
        ("Iran", "Group Stage", 1.33, 1.32), ("Japan", "Round of 16", 1.25, 1.11),
        ("Mexico", "Group Stage", 0.67, 1.78), ("Morocco", "3rd Place Final", 0.86, 1.00),
        ("Netherlands", "Quarter-finals", 2.00, 1.06), ("Poland", "Round of 16", 0.75, 0.78),
        ("Portugal", "Quarter-finals", 2.40, 1.56), ("Qatar", "Group Stage", 0.33, 0.70),
        ("Saudi Arabia", "Group Stage", 1.00, 1.27), ("Senegal", "Round of 16", 1.25, 1.55),
        ("Serbia", "Group Stage", 1.67, 1.32), ("South Korea", "Round of 16", 1.25, 1.72),
        ("Spain", "Round of 16", 2.25, 1.70), ("Switzerland", "Round of 16", 1.25, 1.04),
        ("Tunisia", "Group Stage", 0.33, 1.24), ("United States", "Round of 16", 0.75, 1.50),
        ("Uruguay", "Group Stage", 0.67, 1.41), ("Wales", "Group Stage", 0.33, 0.95),
    ]
    lines = ["team,placement,avg_goal,xg"]
    lines += [f"{t},{p},{g:.2f},{x:.2f}" for t, p, g, x in tables]
    (RESOURCES / "teams_xg.csv").write_text("\n".join(lines) + "\n")
    print("resources: scenarios, theory params, contingency table, teams csv")


def build_models() -> None:
    events = load_events(CORPUS_DIR / "events")
    frames = load_freeze_frames(CORPUS_DIR / "three-sixty")
    split = split_dataset(events, seed=42)
    vocab = RoleVocab.build(split.train)

    models_dir = RESOURCES / "models"
    models_dir.mkdir(parents=True, exist_ok=True)

    train_idx, valid_idx = split.folds[0]
    off_rows = [build_features_off(e, vocab) for e in split.train]
    off_model = train_mlp([off_rows[i] for i in train_idx],
                          replace(OFF_MODEL_CONFIG, seed=0), vocab,
                          valid_rows=[off_rows[i] for i in valid_idx])
    off_model.to_json(models_dir / "dnn_off.json")

    block_rows = [build_features_block(e, frames.get(e.event_id),
                                       DEFAULT_PARAMS, vocab)
                  for e in split.train]
    block_model = train_mlp([block_rows[i] for i in train_idx],
                            replace(BLOCK_MODEL_CONFIG, seed=0), vocab,
                            valid_rows=[block_rows[i] for i in valid_idx])
    block_model.to_json(models_dir / "dnn_block.json")
    print(f"models: trained on {len(train_idx)} rows, "
          f"checkpointed on {len(valid_idx)}")


if __name__ == "__main__":
    build_corpus()
    build_resources()
    build_models()
