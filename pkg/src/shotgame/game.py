"""The 2x2 zero-sum shot-taking game and its Nash equilibria.

Rows are the shooter's strategies (shoot, pass), columns the closest
defender's (blocking, not blocking). Entries hold the shooter's payoff; the
defender's payoff is the negation. The "not blocking" column evaluates the
metrics with the closest defender removed from the block features.
"""

from __future__ import annotations

from dataclasses import dataclass

from .metrics import Scenario, xosot, xsot

SHOOT, PASS = "shoot", "pass"
BLOCKING, NOT_BLOCKING = "blocking", "not_blocking"

TIE_TOL = 1e-9


@dataclass(frozen=True)
class PayoffTable:
    """Shooter payoffs; matrix layout [[shoot/blocking, shoot/not], [pass/blocking, pass/not]]."""

    shoot_blocking: float
    shoot_not_blocking: float
    pass_blocking: float
    pass_not_blocking: float

    def matrix(self) -> list[list[float]]:
        return [[self.shoot_blocking, self.shoot_not_blocking],
                [self.pass_blocking, self.pass_not_blocking]]


@dataclass(frozen=True)
class MixedStrategy:
    p_shoot: float
    q_block: float
    value: float


@dataclass(frozen=True)
class NashSolution:
    pure: list[tuple[str, str]]
    mixed: MixedStrategy | None


def build_payoff_table(s: Scenario) -> PayoffTable:
    """Four metric evaluations: xSOT / xOSOT with and without the closest defender."""
    return PayoffTable(
        shoot_blocking=xsot(s, remove_closest=False)[0],
        shoot_not_blocking=xsot(s, remove_closest=True)[0],
        pass_blocking=xosot(s, remove_closest=False)[0],
        pass_not_blocking=xosot(s, remove_closest=True)[0],
    )


def pure_nash(t: PayoffTable) -> list[tuple[str, str]]:
    """All pure-strategy equilibria, ties within 1e-9 counting as best responses."""
    m = t.matrix()
    rows = (SHOOT, PASS)
    cols = (BLOCKING, NOT_BLOCKING)
    out = []
    for i, row in enumerate(rows):
        for j, col in enumerate(cols):
            shooter_best = m[i][j] >= max(m[0][j], m[1][j]) - TIE_TOL
            # Defender maximizes the negation: prefers the smaller shooter payoff.
            defender_best = m[i][j] <= min(m[i][0], m[i][1]) + TIE_TOL
            if shooter_best and defender_best:
                out.append((row, col))
    return out


def mixed_nash_2x2(t: PayoffTable) -> MixedStrategy:
    """Closed-form mixed solution of the 2x2 zero-sum game.

    With a pure equilibrium present the mixture degenerates to a point mass
    on (the first of) them.
    """
    a, b = t.shoot_blocking, t.shoot_not_blocking
    c, d = t.pass_blocking, t.pass_not_blocking
    pure = pure_nash(t)
    if pure:
        row, col = pure[0]
        p = 1.0 if row == SHOOT else 0.0
        q = 1.0 if col == BLOCKING else 0.0
        value = t.matrix()[0 if row == SHOOT else 1][0 if col == BLOCKING else 1]
        return MixedStrategy(p_shoot=p, q_block=q, value=value)
    denom = (a - b) - (c - d)
    # A degenerate denominator without a pure equilibrium cannot happen in a
    # zero-sum 2x2 game; fail loudly if it somehow does.
    assert abs(denom) > 0, "degenerate game with no pure equilibrium"
    p_shoot = (d - c) / denom
    q_block = (d - b) / denom
    value = (a * d - b * c) / denom
    return MixedStrategy(p_shoot=p_shoot, q_block=q_block, value=value)


def solve(t: PayoffTable) -> NashSolution:
    pure = pure_nash(t)
    mixed = None if pure else mixed_nash_2x2(t)
    return NashSolution(pure=pure, mixed=mixed)


def deviation_gain(t: PayoffTable, solution: MixedStrategy) -> float:
    """Largest payoff improvement any player can get by deviating unilaterally.

    Non-positive (up to roundoff) certifies an equilibrium; works for pure
    solutions as degenerate mixtures.
    """
    m = t.matrix()
    p, q = solution.p_shoot, solution.q_block
    shooter_value = sum(
        pi * (q * m[i][0] + (1 - q) * m[i][1])
        for i, pi in enumerate((p, 1 - p)))
    best_row = max(q * m[i][0] + (1 - q) * m[i][1] for i in range(2))
    # Defender payoff is -shooter payoff: deviating to column j yields
    # -(expected shooter payoff in column j).
    best_col = max(-(p * m[0][j] + (1 - p) * m[1][j]) for j in range(2))
    return max(best_row - shooter_value, best_col - (-shooter_value))
