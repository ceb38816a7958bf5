"""Feature rows for the outcome classifiers.

Every model sees the basic shooter features (role, x, y, distance and angle
to goal). The block model adds the theory-model block probability; the
unprocessed ablation instead appends raw per-player slots straight from the
freeze frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .block_theory import TheoryParams, shot_block_probability
from .geometry import ang2goal, dist2goal, metric_distance
from .ingest import FreezeFrame, ShotEvent, OUTCOME_BLOCK, OUTCOME_OFF

UNKNOWN_ROLE = "Unknown"
UNKNOWN_ROLE_ID = 0

MAX_FRAME_PLAYERS = 22
UNPROCESSED_SLOT_WIDTH = 4  # role placeholder, x, y, teammate flag


@dataclass(frozen=True)
class RoleVocab:
    """Role-name vocabulary with index 0 reserved for unseen roles."""

    names: tuple[str, ...]

    @classmethod
    def build(cls, events: list[ShotEvent]) -> "RoleVocab":
        seen = sorted({e.shooter_role for e in events})
        return cls(names=(UNKNOWN_ROLE, *seen))

    def index(self, role: str | None) -> int:
        if role is None:
            return UNKNOWN_ROLE_ID
        try:
            return self.names.index(role)
        except ValueError:
            return UNKNOWN_ROLE_ID

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class FeatureRow:
    role_id: int
    numeric: np.ndarray
    label: int


def basic_numeric(x: float, y: float) -> list[float]:
    """The basic shooter features shared by every model: x, y, Dist2Goal, Ang2Goal."""
    return [x, y, dist2goal((x, y)), ang2goal((x, y))]


def build_features_off(event: ShotEvent, vocab: RoleVocab) -> FeatureRow:
    """Basic shooter features; label 1 iff the shot went off target."""
    return FeatureRow(
        role_id=vocab.index(event.shooter_role),
        numeric=np.array(basic_numeric(event.x, event.y)),
        label=int(event.outcome == OUTCOME_OFF),
    )


def build_features_block(event: ShotEvent, frame: FreezeFrame | None,
                         theory: TheoryParams, vocab: RoleVocab) -> FeatureRow:
    """Shooter features plus the theory block probability; label 1 iff blocked.

    A missing freeze frame gives a theory feature of 0, identical to a frame
    with no defender in the block zone.
    """
    theory_feature = shot_block_probability(event.location, frame, theory)
    return FeatureRow(
        role_id=vocab.index(event.shooter_role),
        numeric=np.array([*basic_numeric(event.x, event.y), theory_feature]),
        label=int(event.outcome == OUTCOME_BLOCK),
    )


def build_features_unprocessed(event: ShotEvent, frame: FreezeFrame | None,
                               vocab: RoleVocab) -> FeatureRow:
    """Ablation features: raw (role, x, y, teammate) slots for up to 22 players.

    Non-shooter snapshots only, teammates first then opponents, each group
    ordered by distance to the shooter; absent slots stay zero. Roles are not
    carried by 360 frames, so the role slot is a zero placeholder.
    """
    slots = np.zeros(MAX_FRAME_PLAYERS * UNPROCESSED_SLOT_WIDTH)
    if frame is not None:
        others = [p for p in frame.players if not p.actor]
        if len(others) > MAX_FRAME_PLAYERS:
            raise ValueError(
                f"frame {frame.event_id} has {len(others)} non-actor snapshots; "
                f"a pitch holds at most {MAX_FRAME_PLAYERS}")
        others.sort(key=lambda p: (not p.teammate,
                                   metric_distance(event.location, p.location)))
        for i, p in enumerate(others):
            slots[i * 4:(i + 1) * 4] = [0.0, p.x, p.y, float(p.teammate)]
    return FeatureRow(
        role_id=vocab.index(event.shooter_role),
        numeric=np.concatenate([basic_numeric(event.x, event.y), slots]),
        label=int(event.outcome == OUTCOME_BLOCK),
    )


@dataclass(frozen=True)
class Standardizer:
    """Per-feature mean/std fitted on training rows only."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, numeric: np.ndarray) -> "Standardizer":
        mean = numeric.mean(axis=0)
        std = numeric.std(axis=0)
        std = np.where(std < 1e-12, 1.0, std)
        return cls(mean=mean, std=std)

    def transform(self, numeric: np.ndarray) -> np.ndarray:
        return (numeric - self.mean) / self.std


def stack_rows(rows: list[FeatureRow]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(role_ids, numeric matrix, labels) arrays for a list of rows."""
    role_ids = np.array([r.role_id for r in rows], dtype=int)
    numeric = np.stack([r.numeric for r in rows])
    labels = np.array([r.label for r in rows], dtype=float)
    return role_ids, numeric, labels
