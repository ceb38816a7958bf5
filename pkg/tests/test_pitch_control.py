import math

import numpy as np
import pytest

from shotgame.pitch_control import (
    ControlParams,
    ball_travel_time,
    interception_time,
    ppcf_at,
)

P = ControlParams()


def meters(units_y):
    # Convenience: a y offset in meters expressed in pitch units.
    return units_y / 0.85


def test_interception_time_examples():
    assert interception_time((100, 40), (100, 40), P) == pytest.approx(0.7)
    ten_m_away = (100, 40 + meters(10))
    assert interception_time(ten_m_away, (100, 40), P) == pytest.approx(0.7 + 2.0)
    p2 = ControlParams(reaction_time=0.7, max_speed=5.0)
    away = (100, 40 + meters(3.5))
    assert interception_time(away, (100, 40), p2) == pytest.approx(1.4)


def test_ball_travel_time():
    assert ball_travel_time((100, 40), (100, 40), P) == 0.0
    assert ball_travel_time((100, 40), (100, 40 + meters(15)), P) == pytest.approx(1.0)
    assert ball_travel_time((100, 40), (100, 40 + meters(30)), P) == pytest.approx(2.0)


def test_zero_horizon_gives_zero():
    res = ppcf_at((110, 40), [((112, 42), True)], 0.0, P)
    assert res.per_player == {0: 0.0}


def test_single_player_matches_closed_form():
    target = (110.0, 40.0)
    player = ((110.0, 40.0 + meters(8)), True)
    tau = interception_time(player[0], target, P)
    T = tau + 10 * P.sigmoid_spread
    res = ppcf_at(target, [player], T, P)
    ts = np.linspace(0, T, 100_001)
    gate = 1 / (1 + np.exp(-math.pi * (ts - tau) / (math.sqrt(3) * P.sigmoid_spread)))
    oracle = 1 - math.exp(-P.control_rate * float(np.trapezoid(gate, ts)))
    assert abs(res.per_player[0] - oracle) < 1e-3
    assert res.per_player[0] > 1 - 1e-3


def test_symmetric_players_share_equally():
    res = ppcf_at((110, 40), [((110, 45), True), ((110, 35), False)], 1.5, P)
    assert res.per_player[0] == pytest.approx(res.per_player[1])


def test_monotone_in_horizon_and_conserved():
    players = [((110 + i, 38 + j), True) for i in range(3) for j in range(3)]
    prev = {k: 0.0 for k in range(len(players))}
    prev_sum = 0.0
    for T in np.linspace(0.0, 4.0, 21):
        res = ppcf_at((111, 39), players, float(T), P)
        total = sum(res.per_player.values())
        assert total <= 1.0 + 1e-12
        assert total >= prev_sum - 1e-12
        for k, v in res.per_player.items():
            assert v >= prev[k] - 1e-12
        prev, prev_sum = res.per_player, total


def test_conservation_under_crowding():
    # Many players at once would overshoot a raw Euler step; the scaled step
    # must keep the total at or below one.
    players = [((110 + 0.1 * i, 40 + 0.1 * j), i % 2 == 0)
               for i in range(5) for j in range(5)]
    res = ppcf_at((110, 40), players, 5.0, P)
    assert sum(res.per_player.values()) <= 1.0 + 1e-12
    assert sum(res.per_player.values()) > 0.99


def test_closer_player_dominates():
    near = ((110, 40 + meters(4)), True)
    far = ((110, 40 + meters(9)), True)
    for T in (0.8, 1.2, 2.0):
        res = ppcf_at((110, 40), [near, far], T, P)
        assert res.per_player[0] >= res.per_player[1]


def test_step_halving_stability():
    players = [((112, 41), True), ((109, 37), False), ((114, 44), True)]
    for T in (0.6, 1.3, 2.4):
        full = ppcf_at((111, 40), players, T, P, dt=0.04)
        half = ppcf_at((111, 40), players, T, P, dt=0.02)
        for k in full.per_player:
            assert abs(full.per_player[k] - half.per_player[k]) < 1e-3


def test_invalid_inputs():
    with pytest.raises(ValueError):
        ppcf_at((110, 40), [((112, 40), True)], 1.0, P, dt=0.0)
    with pytest.raises(ValueError):
        ppcf_at((110, 40), [((112, 40), True)], -1.0, P)
    with pytest.raises(ValueError):
        ControlParams(ball_speed=0.0).validate()


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "control.json"
    path.write_text('{"reaction_time": 0.5, "warp_speed": 9}')
    with pytest.raises(ValueError, match="warp_speed"):
        ControlParams.from_json(path)
    path.write_text('{"reaction_time": 0.5, "max_speed": 6.0}')
    params = ControlParams.from_json(path)
    assert params.reaction_time == 0.5
    assert params.ball_speed == 15.0
