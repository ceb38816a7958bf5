"""Pitch geometry: metric scaling, goal-relative features, block zone and shot angles.

StatsBomb pitches are 120 x 80 units; a real pitch is 105 x 68 meters.
All distances returned by this module are meters, all shot angles degrees,
except ang2goal which is an absolute angle in radians.
"""

from __future__ import annotations

import math

# StatsBomb coordinate conventions.
PITCH_LENGTH_UNITS = 120.0
PITCH_WIDTH_UNITS = 80.0
PITCH_LENGTH_M = 105.0
PITCH_WIDTH_M = 68.0

SCALE_X = PITCH_LENGTH_M / PITCH_LENGTH_UNITS  # 0.875 m per unit
SCALE_Y = PITCH_WIDTH_M / PITCH_WIDTH_UNITS  # 0.85 m per unit

GOAL_CENTER = (120.0, 40.0)
LEFT_POST = (120.0, 36.0)
RIGHT_POST = (120.0, 44.0)
# Penalty-area line meets the goal line at these two corners.
PENALTY_CORNER_LOW = (120.0, 18.0)
PENALTY_CORNER_HIGH = (120.0, 62.0)

Point = tuple[float, float]


def to_meters(p: Point) -> Point:
    """Scale a pitch-unit point axis-wise into meters."""
    return (p[0] * SCALE_X, p[1] * SCALE_Y)


def metric_distance(p: Point, q: Point) -> float:
    """Euclidean distance in meters between two pitch-unit points."""
    dx = (p[0] - q[0]) * SCALE_X
    dy = (p[1] - q[1]) * SCALE_Y
    return math.hypot(dx, dy)


def dist2goal(p: Point) -> float:
    """Distance in meters from a point to the middle of the goal line (120, 40)."""
    return metric_distance(p, GOAL_CENTER)


def ang2goal(p: Point) -> float:
    """Absolute angle in radians from a point to the goal-line midpoint.

    Returns pi/2 on the goal line itself (the continuous limit), so the
    feature stays defined for shots taken from the byline.
    """
    x, y = p
    dx = (120.0 - x) * SCALE_X
    if dx == 0.0:
        return math.pi / 2
    dy = (40.0 - y) * SCALE_Y
    return abs(math.atan(dy / dx))


def feasible_zone_contains(shooter: Point, q: Point) -> bool:
    """Whether q lies inside the closed triangle shooter / (120, 18) / (120, 62).

    Only defenders inside this zone can get between the ball and the goal.
    A shooter on the goal line gives a degenerate triangle: nothing is inside.
    """
    if shooter[0] >= PITCH_LENGTH_UNITS:
        return False
    # Signed areas against each edge; containment is affine-invariant so the
    # test runs directly in pitch units.
    a, b, c = shooter, PENALTY_CORNER_LOW, PENALTY_CORNER_HIGH

    def cross(o: Point, u: Point, v: Point) -> float:
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])

    d1 = cross(a, b, q)
    d2 = cross(b, c, q)
    d3 = cross(c, a, q)
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


def feasible_angle_span(shooter: Point) -> float:
    """Feasible shot span n in degrees: the shooter-vertex angle between the posts.

    Computed in metric space. Raises for a shooter on a post or on the goal
    segment between the posts, where the span is undefined.
    """
    if shooter == LEFT_POST or shooter == RIGHT_POST:
        raise ValueError("shot angle span undefined: shooter coincides with a post")
    if shooter[0] == 120.0 and LEFT_POST[1] <= shooter[1] <= RIGHT_POST[1]:
        raise ValueError("shot angle span undefined: shooter on the goal segment")
    d1 = metric_distance(shooter, LEFT_POST)
    d2 = metric_distance(shooter, RIGHT_POST)
    w = metric_distance(LEFT_POST, RIGHT_POST)
    cos_n = (d1 * d1 + d2 * d2 - w * w) / (2.0 * d1 * d2)
    cos_n = min(1.0, max(-1.0, cos_n))
    return math.degrees(math.acos(cos_n))


def defender_angle_distance(shooter: Point, d: Point) -> tuple[float, float]:
    """Signed shot angle theta_d (degrees) and metric distance l_d of a defender.

    theta_d is measured from the shooter->left-post ray, positive toward the
    right post, so a defender on the right-post ray sits at theta_d = n.
    Values outside [0, n] are legal and mean the defender is off the cone.
    """
    l_d = metric_distance(shooter, d)
    if l_d == 0.0:
        raise ValueError("defender coincides with the shooter")
    sm = to_meters(shooter)
    lm = to_meters(LEFT_POST)
    dm = to_meters(d)
    vl = (lm[0] - sm[0], lm[1] - sm[1])
    vd = (dm[0] - sm[0], dm[1] - sm[1])
    cross = vl[0] * vd[1] - vl[1] * vd[0]
    dot = vl[0] * vd[0] + vl[1] * vd[1]
    theta_d = math.degrees(math.atan2(cross, dot))
    return theta_d, l_d
