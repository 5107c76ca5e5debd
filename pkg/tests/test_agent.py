import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wpirsa.agent import (
    LearningParams,
    QTable,
    copies_for,
    epsilon_at,
    feasible_actions,
    select_action,
    update,
)
from wpirsa.errors import ContractViolationError, InvalidParameterError
from wpirsa.harvest import Battery, level

XI = 0.21


def battery(packets, capacity=6):
    return Battery(packets * XI, XI, capacity)


def test_feasible_empty_battery():
    assert feasible_actions(battery(0), 5) == (0,)
    assert feasible_actions(battery(0.99), 5) == (0,)
    assert copies_for(battery(0.5), 0) == 0


def test_feasible_three_packets():
    assert feasible_actions(battery(3), 5) == (0, 1, 2)
    assert feasible_actions(battery(3.7), 5) == (0, 1, 2)


def test_feasible_budget_limited():
    assert feasible_actions(battery(6, capacity=6), 5) == (0, 1, 2, 3, 4, 5)
    assert feasible_actions(battery(8, capacity=8), 5) == tuple(range(6))


def test_feasible_slot_cap():
    assert feasible_actions(battery(6), 5, max_total=5) == (0, 1, 2, 3, 4)


def test_feasible_custom_copy_cost():
    b = battery(2)
    assert feasible_actions(b, 5, copy_cost=XI / 10) == tuple(range(6))
    assert feasible_actions(b, 5, copy_cost=3 * XI) == (0,)


@given(st.floats(0, 8), st.integers(0, 6), st.integers(1, 8))
def test_masking_soundness(packets, N, K):
    b = battery(packets, capacity=8)
    acts = feasible_actions(b, N, max_total=K)
    assert acts and acts[0] == 0
    for a in acts:
        n = copies_for(b, a)
        assert n <= level(b) and n <= N + 1 and n <= K
        assert n * XI <= b.energy + 1e-12


def test_select_greedy():
    q = QTable(3, 2, [[0, 5, 1]] * 4)
    assert select_action(q, 1, 0.0, (0, 1, 2), np.random.default_rng(0)) == 1


def test_select_tie_break_lowest():
    q = QTable(3, 2)
    assert select_action(q, 0, 0.0, (0, 1, 2), np.random.default_rng(0)) == 0


def test_select_respects_mask():
    q = QTable(3, 2, [[0, 1, 9]] * 4)
    assert select_action(q, 2, 0.0, (0, 1), np.random.default_rng(0)) == 1


def test_select_uniform_when_exploring():
    rng = np.random.default_rng(1)
    q = QTable(3, 2, [[0, 100, 0]] * 4)
    n = 100_000
    draws = np.array([select_action(q, 0, 1.0, (0, 1, 2), rng) for _ in range(n)])
    sigma = np.sqrt(n * (1 / 3) * (2 / 3))
    for a in range(3):
        assert abs(np.sum(draws == a) - n / 3) < 3 * sigma


def test_select_empty_mask():
    with pytest.raises(ContractViolationError):
        select_action(QTable(1, 1), 0, 0.0, (), np.random.default_rng(0))


def test_update_full_overwrite():
    q = QTable(2, 2, np.full((3, 3), 7.0))
    update(q, 1, 2, 3.0, 0, mu=1.0, delta=0.0)
    assert q.values[1, 2] == 3.0


def test_update_zero_rate():
    q = QTable.random(3, 3, np.random.default_rng(0))
    before = q.copy()
    update(q, 1, 1, 5.0, 2, mu=0.0, delta=0.5)
    assert q == before


def test_update_arithmetic():
    q = QTable(2, 1)
    q.values[0, 0] = 1.0
    q.values[1] = [2.0, -1.0]
    update(q, 0, 0, 1.0, 1, mu=0.1, delta=0.1)
    # 0.9 * 1 + 0.1 * (1 + 0.1 * 2)
    assert q.values[0, 0] == pytest.approx(1.02)


@given(st.integers(0, 4), st.integers(0, 3), st.floats(0, 1), st.integers(0, 4),
       st.floats(0.01, 1), st.floats(0, 0.99))
def test_update_locality(s, a, r, s2, mu, delta):
    q = QTable.random(4, 3, np.random.default_rng(7))
    before = q.values.copy()
    update(q, s, a, r, s2, mu, delta)
    changed = np.argwhere(q.values != before)
    assert len(changed) <= 1
    if len(changed):
        assert tuple(changed[0]) == (s, a)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 2), st.floats(0, 2),
                          st.integers(0, 3)), max_size=200),
       st.floats(0.01, 1), st.floats(0, 0.95))
def test_q_values_stay_bounded(steps, mu, delta):
    r_max = 2.0
    q = QTable(3, 2)
    for s, a, r, s2 in steps:
        update(q, s, a, r, s2, mu, delta)
        assert q.values.min() >= 0
        assert q.values.max() <= r_max / (1 - delta) + 1e-9


def test_epsilon_schedule_defaults():
    p = LearningParams()
    assert epsilon_at(p, 0) == 0.5
    assert epsilon_at(p, p.horizon) == pytest.approx(0.01)
    assert epsilon_at(p, 10 * p.horizon) == pytest.approx(0.01)


def test_epsilon_constant_without_decay():
    p = LearningParams(decay_rate=1.0)
    assert {epsilon_at(p, t) for t in (0, 1, 100, 10_000)} == {0.5}


@given(st.floats(0.5, 1.0), st.integers(0, 20_000))
def test_epsilon_nonincreasing(rate, t):
    p = LearningParams(decay_rate=rate)
    assert epsilon_at(p, t) >= epsilon_at(p, t + 1)


@pytest.mark.parametrize("kw", [dict(learning_rate=0), dict(learning_rate=1.5),
                                dict(discount=1.0), dict(epsilon0=1.2), dict(horizon=0)])
def test_learning_params_validation(kw):
    with pytest.raises(InvalidParameterError):
        LearningParams(**kw)


def test_bandit_converges_with_decay():
    p = LearningParams(horizon=1000)
    for seed in range(5):
        rng = np.random.default_rng(seed)
        best = seed % 3
        q = QTable(0, 2)
        for t in range(1000):
            a = select_action(q, 0, epsilon_at(p, t), (0, 1, 2), rng)
            update(q, 0, a, 1.0 if a == best else 0.0, 0, p.learning_rate, p.discount)
        assert q.greedy(0) == best


def test_export(tmp_path):
    q = QTable(1, 1, [[0.5, 1.0], [2.0, 0.25]])
    assert q.rows() == [(0, 0, 0.5), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 0.25)]
    path = tmp_path / "q.csv"
    q.export_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "state,action,value"
    assert lines[3] == "1,0,2.0"
    assert len(lines) == 5
