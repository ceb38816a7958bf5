import json

import mpmath
import numpy as np
import pytest

from shotgame.analysis import (
    TeamAggregate,
    aggregate_teams,
    build_contingency,
    chi_square_independence,
    confusion_matrix,
    correlation_report,
    pearson,
    read_teams_csv,
    regularized_upper_gamma,
)
from shotgame.ingest import ShotEvent
from shotgame.service.engine import bundled_path

TABLE12 = np.array([[427, 341, 275], [343, 286, 220], [273, 222, 187]])


def test_chi_square_reproduces_reference_study():
    stat, df, p = chi_square_independence(TABLE12)
    assert stat == pytest.approx(0.6163, abs=1e-3)
    assert df == 4
    assert p == pytest.approx(0.9612, abs=1e-3)


def test_bundled_contingency_matches_reference():
    doc = json.loads(bundled_path("contingency_table12.json").read_text())
    assert np.array_equal(np.array(doc["counts"]), TABLE12)


def test_chi_square_proportional_table_is_independent():
    table = np.outer([10, 20, 30], [5, 10, 15])
    stat, df, p = chi_square_independence(table)
    assert stat == pytest.approx(0.0, abs=1e-12)
    assert p == pytest.approx(1.0)


def test_chi_square_diagonal_2x2():
    stat, df, p = chi_square_independence(np.array([[10, 0], [0, 10]]))
    assert stat == pytest.approx(20.0)
    assert df == 1
    oracle = float(mpmath.gammainc(0.5, 10.0, mpmath.inf, regularized=True))
    assert p == pytest.approx(oracle, abs=1e-12)


def test_chi_square_permutation_invariance():
    rng = np.random.default_rng(3)
    table = rng.integers(5, 60, size=(3, 3))
    stat, _, _ = chi_square_independence(table)
    perm = rng.permutation(3)
    stat_p, _, _ = chi_square_independence(table[perm][:, perm])
    assert stat_p == pytest.approx(stat)


def test_chi_square_zero_marginal_errors():
    with pytest.raises(ValueError, match="marginal"):
        chi_square_independence(np.array([[0, 0], [3, 4]]))


def test_incomplete_gamma_against_mpmath():
    worst = 0.0
    for s in (0.5, 1.0, 2.0, 2.5, 4.0, 10.0, 40.0):
        for x in (1e-9, 0.05, 0.4, 1.0, 2.7, 6.0, 15.0, 80.0):
            mine = regularized_upper_gamma(s, x)
            ref = float(mpmath.gammainc(s, x, mpmath.inf, regularized=True))
            worst = max(worst, abs(mine - ref))
    assert worst < 1e-10
    assert regularized_upper_gamma(2.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        regularized_upper_gamma(-1.0, 2.0)


def test_pearson_examples_and_properties():
    xs = [1.0, 2.0, 3.0, 4.0]
    assert pearson(xs, [2 * x + 3 for x in xs]) == pytest.approx(1.0)
    assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0)
    assert pearson(xs, [1, 3, 2, 5]) == pytest.approx(0.8315, abs=1e-4)
    # Positive affine invariance and sign flip.
    ys = [0.3, -1.0, 2.2, 0.7]
    r = pearson(xs, ys)
    assert pearson([5 * x - 2 for x in xs], ys) == pytest.approx(r)
    assert pearson([-x for x in xs], ys) == pytest.approx(-r)
    with pytest.raises(ValueError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1.0], [2.0])


def test_confusion_matrix_perfect_and_tie_rule():
    cm = confusion_matrix([0.9, 0.1, 0.8, 0.2], [1, 0, 1, 0])
    assert cm.diagonal_percent() == (100.0, 100.0)
    assert cm.counts.sum() == 4
    # Constant 0.5 with threshold 0.5: the >= rule sends everything to 1.
    cm = confusion_matrix([0.5, 0.5, 0.5], [0, 1, 1], threshold=0.5)
    assert cm.counts[:, 0].sum() == 0
    assert cm.counts[:, 1].sum() == 3
    row_sums = cm.percentages.sum(axis=1)
    assert row_sums == pytest.approx([100.0, 100.0], abs=1e-2)


def _event(match_id, index, outcome):
    return ShotEvent(event_id=f"{match_id}-{index}", match_id=match_id,
                     team_id=1, team_name="T", shooter_role="CF", x=100, y=40,
                     raw_outcome="x", outcome=outcome, index=index)


def test_contingency_builder_respects_match_boundaries():
    events = [
        _event(1, 1, "Off"), _event(1, 2, "On"), _event(1, 3, "Block"),
        _event(2, 1, "On"), _event(2, 2, "On"),
    ]
    within = build_contingency(events)
    assert within.sum() == 3  # two pairs in match 1, one in match 2
    assert within[0, 1] == 1  # Off -> On
    assert within[1, 2] == 1  # On -> Block
    assert within[1, 1] == 1  # On -> On
    crossed = build_contingency(events, cross_matches=True)
    assert crossed.sum() == 4
    assert crossed[2, 1] == 1  # Block -> On across the boundary


def test_contingency_on_corpus(corpus_events):
    table = build_contingency(corpus_events)
    per_match = {}
    for e in corpus_events:
        per_match[e.match_id] = per_match.get(e.match_id, 0) + 1
    assert table.sum() == sum(n - 1 for n in per_match.values())
    crossed = build_contingency(corpus_events, cross_matches=True)
    assert crossed.sum() == len(corpus_events) - 1


def test_aggregate_teams_identity():
    per_shot = [
        ("A", 1, 0.2, 0.1), ("A", 1, 0.3, 0.5), ("A", 2, 0.1, 0.05),
        ("B", 1, 0.4, 0.2),
    ]
    aggs = aggregate_teams(per_shot)
    by_team = {a.team: a for a in aggs}
    assert by_team["A"].matches == 2
    assert by_team["A"].avg_xsot == pytest.approx((0.5 + 0.1) / 2)
    assert by_team["A"].avg_xosot == pytest.approx((0.6 + 0.05) / 2)
    # max_prob sums per-shot maxima before averaging over matches.
    assert by_team["A"].avg_max_prob == pytest.approx((0.2 + 0.5 + 0.1) / 2)
    assert by_team["A"].avg_max_prob >= max(by_team["A"].avg_xsot / 2, 0)
    # Total identity: sum over teams of matches * avg equals total xSOT.
    total = sum(a.matches * a.avg_xsot for a in aggs)
    assert total == pytest.approx(sum(v for _, _, v, _ in per_shot), abs=1e-6)


def test_correlation_report_joins_and_flags_missing():
    aggs = [
        TeamAggregate("A", 2, 0.5, 0.7, 0.9),
        TeamAggregate("B", 2, 0.2, 0.3, 0.4),
        TeamAggregate("C", 1, 0.8, 0.9, 1.1),
        TeamAggregate("Ghost", 1, 0.1, 0.1, 0.1),
    ]
    external = {"A": {"avg_goal": 1.0, "xg": 1.2},
                "B": {"avg_goal": 0.4, "xg": 0.5},
                "C": {"avg_goal": 2.0, "xg": 1.9}}
    report, missing = correlation_report(aggs, external)
    assert missing == ["Ghost"]
    assert set(report) == {"avg_goal_xg", "avg_goal_xsot", "xg_xsot",
                           "xg_xosot", "xg_max_prob"}
    for v in report.values():
        assert -1.0 <= v <= 1.0


def test_correlation_single_team_errors_but_aggregates_exist():
    aggs = aggregate_teams([("A", 1, 0.2, 0.1), ("A", 2, 0.4, 0.6)])
    assert len(aggs) == 1
    with pytest.raises(ValueError, match="at least 2"):
        correlation_report(aggs, {"A": {"avg_goal": 1.0, "xg": 1.0}})


def test_correlation_no_matching_teams_is_clear_error():
    aggs = aggregate_teams([("Nowhere FC", 1, 0.2, 0.1),
                            ("Elsewhere", 1, 0.3, 0.2)])
    with pytest.raises(ValueError, match="Nowhere FC"):
        correlation_report(aggs, {"Argentina": {"avg_goal": 2.14, "xg": 1.76}})


def test_bundled_teams_csv_is_complete():
    table = read_teams_csv(bundled_path("teams_xg.csv"))
    assert len(table) == 32
    assert table["Argentina"] == {"avg_goal": 2.14, "xg": 1.76}
    assert table["Wales"]["xg"] == 0.95
