"""Statistical validation: independence test, correlations, confusion matrices,
and the per-team metric aggregation used for the correlation study.

The chi-square p-value needs the regularized upper incomplete gamma function;
it is evaluated here directly (series for small arguments, continued fraction
otherwise) so the package carries no statistics dependency.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import OUTCOME_CLASSES, ShotEvent

_GAMMA_EPS = 1e-15
_GAMMA_MAX_ITER = 500


def _lower_gamma_series(s: float, x: float) -> float:
    """Regularized lower incomplete gamma P(s, x) via its power series."""
    term = 1.0 / s
    total = term
    a = s
    for _ in range(_GAMMA_MAX_ITER):
        a += 1.0
        term *= x / a
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    return total * math.exp(-x + s * math.log(x) - math.lgamma(s))

def _upper_gamma_cf(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x) via modified Lentz."""
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    return h * math.exp(-x + s * math.log(x) - math.lgamma(s))


def regularized_upper_gamma(s: float, x: float) -> float:
    """Q(s, x) = Gamma(s, x) / Gamma(s) for s > 0, x >= 0."""
    if s <= 0:
        raise ValueError("s must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return 1.0
    if x < s + 1.0:
        return 1.0 - _lower_gamma_series(s, x)
    return _upper_gamma_cf(s, x)


def chi_square_sf(stat: float, df: int) -> float:
    """Survival function of the chi-square distribution."""
    return regularized_upper_gamma(df / 2.0, stat / 2.0)


def chi_square_independence(table: np.ndarray) -> tuple[float, int, float]:
    """Pearson chi-square test on an r x c contingency table.

    Returns (statistic, degrees of freedom, p-value). Zero marginals make the
    expected counts degenerate and raise.
    """
    t = np.asarray(table, dtype=float)
    if t.ndim != 2 or np.any(t < 0):
        raise ValueError("table must be a 2-D array of non-negative counts")
    row = t.sum(axis=1)
    col = t.sum(axis=0)
    if np.any(row == 0) or np.any(col == 0):
        raise ValueError("contingency table has a zero marginal")
    expected = np.outer(row, col) / t.sum()
    stat = float(((t - expected) ** 2 / expected).sum())
    df = (t.shape[0] - 1) * (t.shape[1] - 1)
    return stat, df, chi_square_sf(stat, df)


def pearson(xs, ys) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need two equal-length samples of size >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx == 0.0 or vy == 0.0:
        raise ValueError("correlation undefined for zero-variance input")
    return float(xc @ yc) / math.sqrt(vx * vy)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows = actual class, columns = predicted class (threshold >= rule)."""

    counts: np.ndarray  # 2x2 ints
    percentages: np.ndarray  # row-normalized, in percent

    def diagonal_percent(self) -> tuple[float, float]:
        return float(self.percentages[0, 0]), float(self.percentages[1, 1])


def confusion_matrix(probs, labels, threshold: float = 0.5) -> ConfusionMatrix:
    p = np.asarray(probs, dtype=float)
    y = np.asarray(labels, dtype=int)
    pred = (p >= threshold).astype(int)
    counts = np.zeros((2, 2), dtype=int)
    for actual in (0, 1):
        for predicted in (0, 1):
            counts[actual, predicted] = int(np.sum((y == actual) & (pred == predicted)))
    row_sums = counts.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        pct = np.where(row_sums > 0, 100.0 * counts / row_sums, 0.0)
    return ConfusionMatrix(counts=counts, percentages=pct)


def build_contingency(events: list[ShotEvent], cross_matches: bool = False) -> np.ndarray:
    """3x3 table of (previous outcome -> following outcome) for consecutive shots.

    Shots are ordered by event index within each match, matches by id. By
    default pairs never span a match boundary; cross_matches=True chains the
    matches into one sequence instead.
    """
    ordered = sorted(events, key=lambda e: (e.match_id, e.index))
    idx = {cls: i for i, cls in enumerate(("Off", "On", "Block"))}
    table = np.zeros((3, 3), dtype=int)
    for prev, cur in zip(ordered, ordered[1:]):
        if not cross_matches and prev.match_id != cur.match_id:
            continue
        table[idx[prev.outcome], idx[cur.outcome]] += 1
    return table


@dataclass
class TeamAggregate:
    team: str
    matches: int
    avg_xsot: float
    avg_xosot: float
    avg_max_prob: float
    avg_goal: float | None = None
    xg: float | None = None


def read_teams_csv(path: str | Path) -> dict[str, dict[str, float]]:
    """Read the external (team, placement, avg_goal, xg) reference table."""
    out: dict[str, dict[str, float]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out[row["team"]] = {"avg_goal": float(row["avg_goal"]),
                                "xg": float(row["xg"])}
    return out


def aggregate_teams(per_shot: list[tuple[str, int, float, float]]) -> list[TeamAggregate]:
    """Average per-match totals of xSOT, xOSOT and max_prob for each team.

    per_shot carries (team, match_id, xsot, xosot) for every evaluated shot.
    """
    by_team: dict[str, dict[int, list[tuple[float, float]]]] = {}
    for team, match_id, v_xsot, v_xosot in per_shot:
        by_team.setdefault(team, {}).setdefault(match_id, []).append((v_xsot, v_xosot))
    aggregates = []
    for team in sorted(by_team):
        matches = by_team[team]
        sums = [(sum(v for v, _ in shots), sum(v for _, v in shots),
                 sum(max(v, w) for v, w in shots)) for shots in matches.values()]
        n = len(sums)
        aggregates.append(TeamAggregate(
            team=team, matches=n,
            avg_xsot=sum(s[0] for s in sums) / n,
            avg_xosot=sum(s[1] for s in sums) / n,
            avg_max_prob=sum(s[2] for s in sums) / n,
        ))
    return aggregates


def correlation_report(aggregates: list[TeamAggregate],
                       external: dict[str, dict[str, float]],
                       ) -> tuple[dict[str, float], list[str]]:
    """The correlation table pairs; also reports teams missing externally."""
    missing = [a.team for a in aggregates if a.team not in external]
    joined = [a for a in aggregates if a.team in external]
    if len(joined) < 2:
        raise ValueError(
            f"only {len(joined)} team(s) matched the external table; "
            f"correlations need at least 2 (missing: {missing})")
    for a in joined:
        a.avg_goal = external[a.team]["avg_goal"]
        a.xg = external[a.team]["xg"]
    goal = [a.avg_goal for a in joined]
    xg = [a.xg for a in joined]
    xsot_v = [a.avg_xsot for a in joined]
    xosot_v = [a.avg_xosot for a in joined]
    max_prob = [a.avg_max_prob for a in joined]
    report = {
        "avg_goal_xg": pearson(goal, xg),
        "avg_goal_xsot": pearson(goal, xsot_v),
        "xg_xsot": pearson(xg, xsot_v),
        "xg_xosot": pearson(xg, xosot_v),
        "xg_max_prob": pearson(xg, max_prob),
    }
    return report, missing
