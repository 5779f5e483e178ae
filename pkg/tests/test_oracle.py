import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from voroplan.envs import TabularPOMDP, two_state_pomdp
from voroplan.oracle import (
    ImpossibleObservationError,
    OracleCapacityError,
    bayes_update,
    optimal_action,
    optimal_q_values,
    optimal_value,
)

P = two_state_pomdp()
B0 = P.initial_belief_vec
GAMMA = 0.95


def test_depth_zero_is_all_zeros():
    np.testing.assert_array_equal(optimal_q_values(P, B0, 0, GAMMA), [0.0, 0.0])
    assert optimal_value(P, B0, 0, GAMMA) == 0.0


def test_depth_one_q_is_expected_immediate_reward():
    # rewards are the identity, so Q_1 is just the belief vector
    q = optimal_q_values(P, B0, 1, GAMMA)
    assert q[0] == pytest.approx(0.85, abs=1e-15)
    assert q[1] == pytest.approx(0.15, abs=1e-15)


def test_depth_two_frozen_values():
    # frozen from an exact rational-arithmetic evaluation of the two-step
    # expectimax: Q = (3239/2000, 140261/160000)
    q = optimal_q_values(P, B0, 2, GAMMA)
    assert q[0] == pytest.approx(1.6195, abs=1e-12)
    assert q[1] == pytest.approx(0.87663125, abs=1e-12)
    assert optimal_value(P, B0, 2, GAMMA) == pytest.approx(1.6195, abs=1e-12)
    assert optimal_action(P, B0, 2, GAMMA) == 0


def test_value_is_max_of_q():
    for depth in (1, 2, 3, 4):
        q = optimal_q_values(P, B0, depth, GAMMA)
        assert optimal_value(P, B0, depth, GAMMA) == pytest.approx(float(q.max()), abs=0)


def test_bayes_update_frozen():
    b2, p_obs = bayes_update(P, B0, action=0, obs=0)
    assert p_obs == pytest.approx(0.6955, abs=1e-15)
    assert b2[0] == pytest.approx(0.9317038102084831, abs=1e-15)
    assert b2[1] == pytest.approx(0.0682961897915169, abs=1e-15)


@given(
    p=st.floats(0.0, 1.0),
    action=st.integers(0, 1),
    obs=st.integers(0, 1),
)
def test_bayes_update_is_a_distribution(p, action, obs):
    b2, p_obs = bayes_update(P, np.array([p, 1.0 - p]), action, obs)
    assert 0.0 < p_obs <= 1.0
    assert b2.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(b2 >= 0.0)


def test_bayes_marginals_sum_to_one():
    for action in range(P.n_actions):
        total = sum(bayes_update(P, B0, action, z)[1] for z in range(P.n_obs))
        assert total == pytest.approx(1.0, abs=1e-12)


def test_impossible_observation_raises():
    silent = TabularPOMDP(
        transition_probs=np.array([[[1.0, 0.0]], [[0.0, 1.0]]]),
        obs_probs=np.array([[1.0, 0.0], [1.0, 0.0]]),
        rewards=np.array([[1.0], [0.0]]),
        initial_belief_vec=np.array([0.5, 0.5]),
    )
    with pytest.raises(ImpossibleObservationError):
        bayes_update(silent, silent.initial_belief_vec, 0, 1)
    # the planner recursion just skips the zero-probability branch
    q = optimal_q_values(silent, silent.initial_belief_vec, 2, 1.0)
    assert q[0] == pytest.approx(0.5 + 0.5, abs=1e-12)


def test_capacity_guard():
    # (2*2)^10 > 1_000_000
    with pytest.raises(OracleCapacityError):
        optimal_q_values(P, B0, 10, GAMMA)
    # 4^9 fits, so only the depth-10 call is refused
    optimal_value(P, B0, 3, GAMMA)


def test_input_validation():
    with pytest.raises(ValueError):
        optimal_q_values(P, B0, -1, GAMMA)
    with pytest.raises(ValueError):
        optimal_q_values(P, B0, 2, 0.0)
    with pytest.raises(ValueError):
        optimal_q_values(P, B0, 2, 1.5)


def test_value_strictly_increases_with_depth():
    # every reachable belief earns at least max(b) >= 1/2 per step here
    values = [optimal_value(P, B0, d, GAMMA) for d in range(7)]
    for shallow, deep in zip(values, values[1:]):
        assert deep > shallow + 0.25


@given(p1=st.floats(0.0, 1.0), p2=st.floats(0.0, 1.0), lam=st.floats(0.0, 1.0))
def test_value_is_convex_in_belief(p1, p2, lam):
    b1 = np.array([p1, 1.0 - p1])
    b2 = np.array([p2, 1.0 - p2])
    mix = lam * b1 + (1.0 - lam) * b2
    v_mix = optimal_value(P, mix, 3, GAMMA)
    v_split = lam * optimal_value(P, b1, 3, GAMMA) + (1.0 - lam) * optimal_value(P, b2, 3, GAMMA)
    assert v_mix <= v_split + 1e-9


def test_tie_breaks_to_lowest_action_index():
    twin = TabularPOMDP(
        transition_probs=np.array(
            [
                [[0.9, 0.1], [0.9, 0.1]],
                [[0.3, 0.7], [0.3, 0.7]],
            ]
        ),
        obs_probs=np.array([[0.8, 0.2], [0.25, 0.75]]),
        rewards=np.array([[1.0, 1.0], [0.0, 0.0]]),
        initial_belief_vec=np.array([0.85, 0.15]),
    )
    q = optimal_q_values(twin, twin.initial_belief_vec, 3, GAMMA)
    assert q[0] == pytest.approx(q[1], abs=0)
    assert optimal_action(twin, twin.initial_belief_vec, 3, GAMMA) == 0
