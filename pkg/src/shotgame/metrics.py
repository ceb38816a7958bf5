"""xSOT / xOSOT: expected probability of a shot on target, on and off the ball.

xSOT for the shooter is 1 - min(P(off) + P(block), 1) from the two trained
classifiers. xOSOT asks the same question for every off-ball teammate as a
hypothetical pass recipient, discounted by their probability of controlling
the pass, and takes the best one. The "not blocking" counterfactual removes
the closest defender from the frame before recomputing the block features.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .block_theory import TheoryParams, shot_block_probability
from .features import FeatureRow, RoleVocab, UNKNOWN_ROLE_ID, basic_numeric
from .geometry import Point, defender_angle_distance, metric_distance
from .ingest import FreezeFrame, PlayerSnapshot
from .nnet import MlpModel, mlp_forward
from .pitch_control import ControlParams, ball_travel_time, ppcf_at


@dataclass(frozen=True)
class Scenario:
    """Everything needed to evaluate one shot-taking situation."""

    shooter_xy: Point
    shooter_role: str | None
    frame: FreezeFrame
    off_model: MlpModel
    block_model: MlpModel
    theory: TheoryParams
    control: ControlParams


@dataclass(frozen=True)
class AttackerBreakdown:
    attacker_id: int  # -1 for the shooter
    x: float
    y: float
    p_on: float
    p_off: float
    p_block: float
    p_control: float | None  # None for the shooter


def closest_defender(shooter: Point, frame: FreezeFrame) -> PlayerSnapshot | None:
    """Nearest non-goalkeeper opponent; ties broken by smaller shot angle."""
    best = None
    best_key = None
    for snap in frame.players:
        if snap.teammate or snap.keeper:
            continue
        if snap.location == tuple(shooter):
            continue
        theta_d, l_d = defender_angle_distance(shooter, snap.location)
        key = (l_d, theta_d)
        if best_key is None or key < best_key:
            best, best_key = snap, key
    return best


def _without_snapshot(frame: FreezeFrame, snap: PlayerSnapshot) -> FreezeFrame:
    players = list(frame.players)
    players.remove(snap)
    return replace(frame, players=tuple(players))


def _shot_probs(shooter_xy: Point, role: str | None, block_frame: FreezeFrame,
                s: Scenario) -> tuple[float, float]:
    """(p_off, p_block) for a shot taken at shooter_xy with the given role."""
    role_id = (UNKNOWN_ROLE_ID if role is None
               else s.off_model.vocab.index(role))
    basic = basic_numeric(shooter_xy[0], shooter_xy[1])
    p_off = mlp_forward(s.off_model, FeatureRow(
        role_id=role_id, numeric=np.array(basic), label=0))
    theory_feature = shot_block_probability(shooter_xy, block_frame, s.theory)
    block_role_id = (UNKNOWN_ROLE_ID if role is None
                     else s.block_model.vocab.index(role))
    p_block = mlp_forward(s.block_model, FeatureRow(
        role_id=block_role_id, numeric=np.array([*basic, theory_feature]), label=0))
    return p_off, p_block


def _shot_on(p_off: float, p_block: float) -> float:
    return 1.0 - min(p_off + p_block, 1.0)


def block_feature_frame(s: Scenario, remove_closest: bool) -> FreezeFrame:
    """The frame used for block features; drops the closest defender if asked."""
    if not remove_closest:
        return s.frame
    target = closest_defender(s.shooter_xy, s.frame)
    if target is None:
        return s.frame
    return _without_snapshot(s.frame, target)


def xsot(s: Scenario, remove_closest: bool = False) -> tuple[float, AttackerBreakdown]:
    """Shooter's expected probability of a shot on target."""
    p_off, p_block = _shot_probs(s.shooter_xy, s.shooter_role,
                                 block_feature_frame(s, remove_closest), s)
    value = _shot_on(p_off, p_block)
    breakdown = AttackerBreakdown(
        attacker_id=-1, x=s.shooter_xy[0], y=s.shooter_xy[1],
        p_on=value, p_off=p_off, p_block=p_block, p_control=None)
    return value, breakdown


def off_ball_teammates(frame: FreezeFrame) -> list[tuple[int, PlayerSnapshot]]:
    """(index in frame, snapshot) for every non-actor teammate."""
    return [(i, p) for i, p in enumerate(frame.players)
            if p.teammate and not p.actor]


def xosot(s: Scenario, remove_closest: bool = False,
          ) -> tuple[float, int | None, list[AttackerBreakdown]]:
    """Best pass option: max over teammates of xSOT_a * P(control_a).

    Off-ball roles are unknown in freeze frames, so each candidate is scored
    with the reserved Unknown role. The control probability integrates pitch
    control at the teammate's spot over the ball's travel time, with every
    frame player competing. Returns (value, best attacker frame index,
    breakdowns); no teammates gives (0.0, None, []).
    """
    attackers = off_ball_teammates(s.frame)
    if not attackers:
        return 0.0, None, []
    block_frame = block_feature_frame(s, remove_closest)
    all_players = [(p.location, p.teammate) for p in s.frame.players]
    breakdowns = []
    for idx, snap in attackers:
        p_off, p_block = _shot_probs(snap.location, None, block_frame, s)
        travel = ball_travel_time(s.shooter_xy, snap.location, s.control)
        control = ppcf_at(snap.location, all_players, travel, s.control)
        p_control = control.per_player[idx]
        breakdowns.append(AttackerBreakdown(
            attacker_id=idx, x=snap.x, y=snap.y,
            p_on=_shot_on(p_off, p_block) * p_control,
            p_off=p_off, p_block=p_block, p_control=p_control))
    best = max(breakdowns, key=lambda b: b.p_on)
    return best.p_on, best.attacker_id, breakdowns
