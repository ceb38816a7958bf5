"""Theory-based shot block model.

A shot from angle theta (degrees inside the feasible span [0, n]) is blocked
by the nearest defender that manages to reach it. Each defender's per-angle
block chance is a truncated normal density in the scaled angle offset
x = (theta - theta_d) / c1 with spread sigma = c4 + l_d * c2, clamped to [0, 1]
so it can act as a probability. Chaining defenders in distance order and
averaging over a uniform shot angle gives the shot block probability

    P(block) = (c3 / n) * integral_0^n P(block | theta) dtheta,

approximated with the trapezoidal rule on a one-degree grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .geometry import (
    Point,
    defender_angle_distance,
    feasible_angle_span,
    feasible_zone_contains,
)
from .ingest import FreezeFrame
from .optim import OptimResult, minimize_fd_cg, minimize_nelder_mead, minimize_powell

THEORY_SCHEMA_VERSION = 1
PROB_CLAMP = 1e-7

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class TheoryParams:
    """The five scalars of the block model; see module docstring for roles."""

    c1: float
    c2: float
    c3: float
    c4: float
    a: float

    def validate(self) -> None:
        if not (self.c1 > 0):
            raise ValueError("c1 must be positive")
        if not (self.c2 >= 0 and self.c4 > 0):
            raise ValueError("sigma = c4 + l*c2 must stay positive for all l >= 0")
        if not (0 < self.c3 <= 1):
            raise ValueError("c3 must lie in (0, 1]")
        if not (self.a < 0):
            raise ValueError("a must be negative (b = -a bounds the support)")

    def is_valid(self) -> bool:
        try:
            self.validate()
        except ValueError:
            return False
        return True

    def as_vector(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3, self.c4, self.a], dtype=float)

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "TheoryParams":
        return cls(c1=float(v[0]), c2=float(v[1]), c3=float(v[2]),
                   c4=float(v[3]), a=float(v[4]))

    def to_json(self, path: str | Path) -> None:
        doc = {"c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4,
               "a": self.a, "version": THEORY_SCHEMA_VERSION}
        Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True))

    @classmethod
    def from_json(cls, path: str | Path) -> "TheoryParams":
        doc = json.loads(Path(path).read_text())
        if doc.get("version") != THEORY_SCHEMA_VERSION:
            raise ValueError(f"theory params file {path} has unsupported version "
                             f"{doc.get('version')}")
        p = cls(c1=doc["c1"], c2=doc["c2"], c3=doc["c3"], c4=doc["c4"], a=doc["a"])
        p.validate()
        return p


# Fitted values reported for the full open-data corpus; shipped as defaults.
DEFAULT_PARAMS = TheoryParams(c1=36.9463, c2=12.3579, c3=0.4998, c4=0.1577, a=-2.3098)

# Starting point for fits: same order of magnitude as the shipped optimum.
DEFAULT_X0 = (30.0, 10.0, 0.5, 0.2, -2.0)


@dataclass(frozen=True)
class FilteredDefenders:
    """(theta_d, l_d) pairs sorted ascending by distance, ties by angle."""

    defenders: tuple[tuple[float, float], ...]

    def __len__(self) -> int:
        return len(self.defenders)


def filter_defenders(shooter: Point, frame: FreezeFrame | None) -> FilteredDefenders:
    """Opponents (never the keeper) inside the feasible block zone.

    An empty result is valid and means no defender can block (|D| = 0).
    """
    if frame is None:
        return FilteredDefenders(defenders=())
    pairs = []
    for snap in frame.players:
        if snap.teammate or snap.keeper or snap.actor:
            continue
        if snap.location == tuple(shooter):
            continue
        if not feasible_zone_contains(shooter, snap.location):
            continue
        theta_d, l_d = defender_angle_distance(shooter, snap.location)
        pairs.append((theta_d, l_d))
    pairs.sort(key=lambda p: (p[1], p[0]))
    return FilteredDefenders(defenders=tuple(pairs))


def _phi(x: np.ndarray | float) -> np.ndarray | float:
    return np.exp(-0.5 * np.square(x)) / _SQRT_2PI


def _truncation_mass(sigma: float, a: float) -> float:
    """Phi(-a/sigma) - Phi(a/sigma), the truncated normal's normalizer."""
    return math.erf(-a / (sigma * math.sqrt(2.0)))


def defender_block_density(theta: float, theta_d: float, l_d: float,
                           p: TheoryParams) -> float:
    """One defender's block chance at shot angle theta, in [0, 1].

    The raw truncated normal density can exceed 1 for tight spreads; it is
    clamped because the chain rule treats it as a probability.
    """
    if l_d <= 0:
        raise ValueError("defender distance must be positive")
    sigma = p.c4 + l_d * p.c2
    if sigma <= 0:
        raise ValueError(f"invalid params: sigma = {sigma} for l_d = {l_d}")
    x = (theta - theta_d) / p.c1
    if not (p.a < x < -p.a):
        return 0.0
    f = float(_phi(x / sigma)) / (sigma * _truncation_mass(sigma, p.a))
    return min(f, 1.0)


def block_prob_given_angle(theta: float, defenders: FilteredDefenders,
                           p: TheoryParams) -> float:
    """P(block | theta): the nearest defender blocks, or fails and the next tries."""
    prob = 0.0
    survive = 1.0
    for theta_d, l_d in defenders.defenders:
        q = defender_block_density(theta, theta_d, l_d, p)
        prob += survive * q
        survive *= 1.0 - q
    return prob


def angle_grid(n: float) -> np.ndarray:
    """Integration grid over [0, n]: whole degrees plus the fractional endpoint."""
    whole = np.arange(0.0, math.floor(n) + 1.0)
    if n > whole[-1]:
        return np.append(whole, n)
    return whole


def _density_matrix(grid: np.ndarray, thetas: np.ndarray, ls: np.ndarray,
                    p: TheoryParams) -> np.ndarray:
    """Per-defender densities on the grid, shape (len(thetas), len(grid))."""
    sigmas = p.c4 + ls * p.c2
    x = (grid[None, :] - thetas[:, None]) / p.c1
    masses = np.array([_truncation_mass(s, p.a) for s in sigmas])
    f = _phi(x / sigmas[:, None]) / (sigmas * masses)[:, None]
    f = np.minimum(f, 1.0)
    f[np.abs(x) >= -p.a] = 0.0
    return f


def _chain_curve(grid: np.ndarray, defenders: FilteredDefenders,
                 p: TheoryParams) -> np.ndarray:
    """P(block | theta) on the grid, defenders chained in distance order."""
    if len(defenders) == 0:
        return np.zeros_like(grid)
    thetas = np.array([d[0] for d in defenders.defenders])
    ls = np.array([d[1] for d in defenders.defenders])
    q = _density_matrix(grid, thetas, ls, p)
    return 1.0 - np.prod(1.0 - q, axis=0)


def block_curve(shooter: Point, frame: FreezeFrame | None,
                p: TheoryParams) -> tuple[np.ndarray, np.ndarray]:
    """(grid, P(block | theta)) over the feasible span, for plots and the UI.

    Empty arrays when the shooter sits on the goal segment and has no span.
    """
    try:
        n = feasible_angle_span(shooter)
    except ValueError:
        return np.zeros(0), np.zeros(0)
    grid = angle_grid(n)
    return grid, _chain_curve(grid, filter_defenders(shooter, frame), p)


def shot_block_probability(shooter: Point, frame: FreezeFrame | None,
                           p: TheoryParams) -> float:
    """The model's shot block probability; 0 whenever no defender can block."""
    defenders = filter_defenders(shooter, frame)
    if len(defenders) == 0:
        return 0.0
    n = feasible_angle_span(shooter)
    grid = angle_grid(n)
    curve = _chain_curve(grid, defenders, p)
    return p.c3 / n * float(np.trapezoid(curve, grid))


@dataclass
class _PreparedShot:
    """Geometry precomputed once per event so fitting loops stay cheap."""

    grid: np.ndarray
    thetas: np.ndarray
    ls: np.ndarray
    n: float
    label: float

    @classmethod
    def build(cls, shooter: Point, frame: FreezeFrame | None, label: bool) -> "_PreparedShot":
        try:
            n = feasible_angle_span(shooter)
        except ValueError:
            # Shooter on the goal segment: no feasible span, nothing can block.
            return cls(grid=np.zeros(0), thetas=np.zeros(0), ls=np.zeros(0),
                       n=0.0, label=float(label))
        defenders = filter_defenders(shooter, frame)
        return cls(
            grid=angle_grid(n),
            thetas=np.array([d[0] for d in defenders.defenders]),
            ls=np.array([d[1] for d in defenders.defenders]),
            n=n,
            label=float(label),
        )

    def probability(self, p: TheoryParams) -> float:
        if self.thetas.size == 0 or self.n <= 0:
            return 0.0
        q = _density_matrix(self.grid, self.thetas, self.ls, p)
        curve = 1.0 - np.prod(1.0 - q, axis=0)
        return p.c3 / self.n * float(np.trapezoid(curve, self.grid))


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean binary cross-entropy with probabilities clamped away from {0, 1}."""
    p = np.clip(probs, PROB_CLAMP, 1.0 - PROB_CLAMP)
    y = np.asarray(labels, dtype=float)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


_METHODS: dict[str, Callable[..., OptimResult]] = {
    "powell": minimize_powell,
    "nelder_mead": minimize_nelder_mead,
    "nelder-mead": minimize_nelder_mead,
    "fd_cg": minimize_fd_cg,
    "fd-cg": minimize_fd_cg,
}

TrainExample = tuple[Point, FreezeFrame | None, bool]


def _subset_cel(prepared: list[_PreparedShot], idx: np.ndarray,
                p: TheoryParams) -> float:
    probs = np.array([prepared[i].probability(p) for i in idx])
    labels = np.array([prepared[i].label for i in idx])
    return cross_entropy(probs, labels)


def fit_theory_params(train: list[TrainExample], method: str = "powell",
                      folds: list[tuple[np.ndarray, np.ndarray]] | None = None,
                      x0: Sequence[float] = DEFAULT_X0, tol: float = 1e-6,
                      max_iter: int = 60) -> tuple[TheoryParams, list[float]]:
    """Fit the five parameters by minimizing cross-entropy on the Block label.

    One fit per CV fold gives the per-fold validation losses; the returned
    parameters come from a final fit on all of ``train``. Invalid parameter
    vectors are rejected with an infinite loss, which keeps every optimizer
    inside the feasible region without projection.
    """
    if method not in _METHODS:
        raise ValueError(f"unknown optimization method {method!r}")
    minimize = _METHODS[method]
    prepared = [_PreparedShot.build(shooter, frame, label)
                for shooter, frame, label in train]
    labels = np.array([ps.label for ps in prepared])
    if labels.min() == labels.max():
        raise ValueError("training data needs both block and non-block examples")

    def objective_for(idx: np.ndarray) -> Callable[[np.ndarray], float]:
        def objective(v: np.ndarray) -> float:
            p = TheoryParams.from_vector(v)
            if not p.is_valid():
                return math.inf
            return _subset_cel(prepared, idx, p)
        return objective

    cv_cel: list[float] = []
    if folds is None:
        folds = []
    for train_idx, valid_idx in folds:
        res = minimize(objective_for(np.asarray(train_idx)), x0, tol=tol,
                       max_iter=max_iter)
        cv_cel.append(_subset_cel(prepared, np.asarray(valid_idx),
                                  TheoryParams.from_vector(res.x_star)))

    all_idx = np.arange(len(prepared))
    res = minimize(objective_for(all_idx), x0, tol=tol, max_iter=max_iter)
    params = TheoryParams.from_vector(res.x_star)
    params.validate()
    return params, cv_cel
