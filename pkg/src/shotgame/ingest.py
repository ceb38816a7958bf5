"""StatsBomb open-data ingestion: shot events, 360 freeze frames, dataset splits.

Reads per-match ``events/<match_id>.json`` and ``three-sixty/<match_id>.json``
files, groups raw shot outcomes into the three-class space (on / off / block),
and produces deterministic stratified train/test splits with 5 CV folds.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

DATASET_SCHEMA_VERSION = 1

OUTCOME_ON = "On"
OUTCOME_OFF = "Off"
OUTCOME_BLOCK = "Block"
OUTCOME_REMOVED = "Removed"
OUTCOME_CLASSES = (OUTCOME_ON, OUTCOME_OFF, OUTCOME_BLOCK)

# StatsBomb shot outcome name -> grouped class.
_OUTCOME_GROUPS = {
    "Goal": OUTCOME_ON,
    "Saved": OUTCOME_ON,
    "Off T": OUTCOME_OFF,
    "Wayward": OUTCOME_OFF,
    "Post": OUTCOME_OFF,
    "Saved Off Target": OUTCOME_OFF,
    "Blocked": OUTCOME_BLOCK,
    "Saved to Post": OUTCOME_REMOVED,
}

PENALTY_SHOOTOUT_PERIOD = 5


class DataLoadError(Exception):
    """A data file could not be read or parsed."""


class UnknownOutcomeError(Exception):
    """A shot carried an outcome name outside the known grouping table."""


@dataclass(frozen=True)
class ShotEvent:
    event_id: str
    match_id: int
    team_id: int
    team_name: str
    shooter_role: str
    x: float
    y: float
    raw_outcome: str
    outcome: str
    index: int = 0

    @property
    def location(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class PlayerSnapshot:
    x: float
    y: float
    teammate: bool
    actor: bool
    keeper: bool

    @property
    def location(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class FreezeFrame:
    event_id: str
    players: tuple[PlayerSnapshot, ...]

    @property
    def actor(self) -> PlayerSnapshot:
        return next(p for p in self.players if p.actor)


@dataclass
class DatasetSplit:
    train: list[ShotEvent]
    test: list[ShotEvent]
    folds: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)


def group_outcome(raw: str) -> str:
    """Map a StatsBomb shot outcome name onto {On, Off, Block, Removed}."""
    try:
        return _OUTCOME_GROUPS[raw]
    except KeyError:
        raise UnknownOutcomeError(f"unknown shot outcome name: {raw!r}") from None


def load_events(events_dir: str | Path) -> list[ShotEvent]:
    """Load every shot event from a directory of per-match event files.

    Penalty shoot-out shots (period 5) are excluded, shots whose grouped
    outcome is Removed are dropped, and the result is ordered by
    (match_id, event index) so repeated loads are identical.
    """
    events_dir = Path(events_dir)
    out: list[ShotEvent] = []
    for path in sorted(events_dir.glob("*.json")):
        try:
            match_id = int(path.stem)
        except ValueError:
            raise DataLoadError(f"event file name is not a match id: {path}")
        try:
            raw_events = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise DataLoadError(f"malformed JSON in {path}: {exc}") from exc
        for idx, ev in enumerate(raw_events):
            if ev.get("type", {}).get("name") != "Shot":
                continue
            if ev.get("period") == PENALTY_SHOOTOUT_PERIOD:
                continue
            raw_outcome = ev["shot"]["outcome"]["name"]
            outcome = group_outcome(raw_outcome)
            if outcome == OUTCOME_REMOVED:
                continue
            loc = ev["location"]
            out.append(ShotEvent(
                event_id=ev["id"],
                match_id=match_id,
                team_id=ev["team"]["id"],
                team_name=ev["team"].get("name", str(ev["team"]["id"])),
                shooter_role=ev.get("position", {}).get("name", "Unknown"),
                x=float(loc[0]),
                y=float(loc[1]),
                raw_outcome=raw_outcome,
                outcome=outcome,
                index=int(ev.get("index", idx)),
            ))
    out.sort(key=lambda e: (e.match_id, e.index))
    return out


def load_freeze_frames(frames_dir: str | Path) -> dict[str, FreezeFrame]:
    """Load 360 freeze frames keyed by event uuid.

    Frames without exactly one actor snapshot violate the data contract and
    are skipped with a warning; events without 360 coverage are simply absent.
    """
    frames_dir = Path(frames_dir)
    out: dict[str, FreezeFrame] = {}
    for path in sorted(frames_dir.glob("*.json")):
        try:
            raw_frames = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise DataLoadError(f"malformed JSON in {path}: {exc}") from exc
        for entry in raw_frames:
            event_id = entry["event_uuid"]
            players = tuple(
                PlayerSnapshot(
                    x=float(snap["location"][0]),
                    y=float(snap["location"][1]),
                    teammate=bool(snap["teammate"]),
                    actor=bool(snap["actor"]),
                    keeper=bool(snap["keeper"]),
                )
                for snap in entry["freeze_frame"]
            )
            n_actors = sum(p.actor for p in players)
            if n_actors != 1:
                logger.warning("skipping frame %s in %s: %d actor snapshots",
                               event_id, path.name, n_actors)
                continue
            out[event_id] = FreezeFrame(event_id=event_id, players=players)
    return out


def split_dataset(events: list[ShotEvent], seed: int = 42, n_folds: int = 5,
                  test_fraction: float = 0.2) -> DatasetSplit:
    """Stratified 80/20 split plus stratified CV folds over the train part.

    Deterministic for a fixed seed on any platform: events are put in a
    stable order before shuffling, per-outcome index pools are shuffled with
    one seeded generator, and fold assignment is round-robin per stratum.
    """
    if not events:
        raise ValueError("cannot split an empty event list")
    events = sorted(events, key=lambda e: (e.match_id, e.index))
    labels = [e.outcome for e in events]
    rng = np.random.default_rng(seed)

    test_idx: list[int] = []
    train_idx: list[int] = []
    per_class_train: dict[str, list[int]] = {}
    for cls in OUTCOME_CLASSES:
        pool = [i for i, y in enumerate(labels) if y == cls]
        if not pool:
            continue
        if len(pool) < n_folds:
            raise ValueError(
                f"outcome class {cls!r} has only {len(pool)} events; "
                f"cannot stratify {n_folds} folds")
        pool = list(rng.permutation(pool))
        n_test = round(test_fraction * len(pool))
        test_idx.extend(pool[:n_test])
        per_class_train[cls] = pool[n_test:]
        train_idx.extend(pool[n_test:])

    train_idx.sort()
    test_idx.sort()
    train = [events[i] for i in train_idx]
    test = [events[i] for i in test_idx]

    # Fold ids address positions in the train list, round-robin per class so
    # every fold keeps the class proportions within rounding.
    pos_of = {orig: pos for pos, orig in enumerate(train_idx)}
    fold_of = np.empty(len(train), dtype=int)
    for cls in OUTCOME_CLASSES:
        for j, orig in enumerate(per_class_train.get(cls, [])):
            fold_of[pos_of[orig]] = j % n_folds
    folds = []
    all_pos = np.arange(len(train))
    for k in range(n_folds):
        valid = all_pos[fold_of == k]
        folds.append((all_pos[fold_of != k], valid))
    return DatasetSplit(train=train, test=test, folds=folds)


def save_dataset(path: str | Path, events: list[ShotEvent],
                 frames: dict[str, FreezeFrame]) -> None:
    """Write the normalized dataset file consumed by the downstream stages."""
    doc = {
        "version": DATASET_SCHEMA_VERSION,
        "events": [
            {
                "event_id": e.event_id, "match_id": e.match_id,
                "team_id": e.team_id, "team_name": e.team_name,
                "shooter_role": e.shooter_role, "x": e.x, "y": e.y,
                "raw_outcome": e.raw_outcome, "outcome": e.outcome,
                "index": e.index,
            }
            for e in events
        ],
        "frames": {
            fid: [
                {"x": p.x, "y": p.y, "teammate": p.teammate,
                 "actor": p.actor, "keeper": p.keeper}
                for p in frame.players
            ]
            for fid, frame in sorted(frames.items())
        },
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True))


def load_dataset(path: str | Path) -> tuple[list[ShotEvent], dict[str, FreezeFrame]]:
    """Read a normalized dataset file written by :func:`save_dataset`."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataLoadError(f"malformed dataset file {path}: {exc}") from exc
    if doc.get("version") != DATASET_SCHEMA_VERSION:
        raise DataLoadError(
            f"dataset file {path} has version {doc.get('version')}, "
            f"expected {DATASET_SCHEMA_VERSION}")
    events = [ShotEvent(**e) for e in doc["events"]]
    frames = {
        fid: FreezeFrame(event_id=fid,
                         players=tuple(PlayerSnapshot(**p) for p in snaps))
        for fid, snaps in doc["frames"].items()
    }
    return events, frames
