"""Exhaustive finite-horizon solver for tabular POMDPs.

Enumerates the full action/observation tree from a belief vector, so it is
exact and deliberately slow; it is the ground truth the sampling-based
solvers are measured against. Inputs whose tree would exceed
``(n_actions * n_obs) ** depth > CAPACITY`` are refused.
"""

from __future__ import annotations

import numpy as np

from .envs import TabularPOMDP

CAPACITY = 1_000_000


class ImpossibleObservationError(ValueError):
    """Bayes update conditioned on a zero-probability observation."""


class OracleCapacityError(ValueError):
    """The exact expansion would exceed the enumeration capacity."""


def _check_capacity(pomdp: TabularPOMDP, depth: int) -> None:
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    if (pomdp.n_actions * pomdp.n_obs) ** depth > CAPACITY:
        raise OracleCapacityError(
            f"(|A|*|Z|)^depth = ({pomdp.n_actions}*{pomdp.n_obs})^{depth} exceeds {CAPACITY}"
        )


def bayes_update(pomdp: TabularPOMDP, belief: np.ndarray, action: int, obs: int) -> tuple[np.ndarray, float]:
    """Posterior over next states given (action, observation), plus the
    observation's marginal probability under the belief."""
    belief = np.asarray(belief, dtype=float)
    prior = belief @ pomdp.transition_probs[:, action, :]
    joint = pomdp.obs_probs[:, obs] * prior
    p_obs = float(joint.sum())
    if p_obs <= 0.0:
        raise ImpossibleObservationError(f"observation {obs} has probability 0 after action {action}")
    return joint / p_obs, p_obs


def _q_values(pomdp: TabularPOMDP, belief: np.ndarray, depth: int, gamma: float) -> np.ndarray:
    q = belief @ pomdp.rewards
    if depth > 1:
        for a in range(pomdp.n_actions):
            prior = belief @ pomdp.transition_probs[:, a, :]
            acc = 0.0
            for z in range(pomdp.n_obs):
                joint = pomdp.obs_probs[:, z] * prior
                p_obs = float(joint.sum())
                if p_obs > 0.0:
                    acc += p_obs * float(_q_values(pomdp, joint / p_obs, depth - 1, gamma).max())
            q[a] += gamma * acc
    return q


def optimal_q_values(pomdp: TabularPOMDP, belief: np.ndarray, depth: int, gamma: float) -> np.ndarray:
    """Exact depth-limited Q values for every action at ``belief``."""
    _check_capacity(pomdp, depth)
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    belief = np.asarray(belief, dtype=float)
    if depth == 0:
        return np.zeros(pomdp.n_actions)
    return _q_values(pomdp, belief, depth, gamma)


def optimal_value(pomdp: TabularPOMDP, belief: np.ndarray, depth: int, gamma: float) -> float:
    """Exact depth-limited optimal value at ``belief``."""
    if depth == 0:
        return 0.0
    return float(optimal_q_values(pomdp, belief, depth, gamma).max())


def optimal_action(pomdp: TabularPOMDP, belief: np.ndarray, depth: int, gamma: float) -> int:
    """Lowest-index maximizer of the exact Q values."""
    return int(optimal_q_values(pomdp, belief, depth, gamma).argmax())
