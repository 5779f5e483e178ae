"""Core POMDP abstractions shared by the solvers and environments.

Beliefs are weighted particle sets. Histories are tuples of
(action index, observation token) pairs, where a token is either a discrete
observation id or a stored partition center; tokens are compared bit-exactly
and never re-derived from raw observations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Protocol, Sequence, runtime_checkable

import numpy as np

State = Any
Observation = Any
ObservationToken = Any
# ((a_0, tok_0), (a_1, tok_1), ...) from the root down, at most `horizon` pairs.
HistoryKey = tuple
RandomStream = np.random.Generator


class EmptyBeliefError(ValueError):
    """An operation that needs at least one particle got an empty belief."""


class StateOutOfBoxError(ValueError):
    """A simulator was queried with a state outside its valid box."""


def extend_history(key: HistoryKey, action: int, token: ObservationToken) -> HistoryKey:
    """Append one (action, token) pair; the token is stored as-is."""
    return key + ((action, token),)


@runtime_checkable
class GenerativeModel(Protocol):
    """Black-box simulator interface used by all solvers.

    ``step`` draws (next state, observation, reward). ``transition`` draws only
    the next state and ``obs_density`` evaluates the observation likelihood;
    together they are what the bootstrap filter needs.
    """

    n_actions: int

    def step(self, state: State, action: int, rng: RandomStream) -> tuple[State, Observation, float]: ...

    def transition(self, state: State, action: int, rng: RandomStream) -> State: ...

    def obs_density(self, state: State, obs: Observation) -> float: ...


@dataclass(frozen=True)
class PlanningConfig:
    """Shared planning constants: discount, search depth, and reward scale."""

    gamma: float
    horizon: int
    r_max: float

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.horizon < 1 or self.horizon != int(self.horizon):
            raise ValueError(f"horizon must be a positive integer, got {self.horizon}")
        if not (self.r_max > 0.0 and np.isfinite(self.r_max)):
            raise ValueError(f"r_max must be positive and finite, got {self.r_max}")

    def v_max(self, depth: int) -> float:
        """Largest possible discounted tail sum from ``depth`` to the horizon."""
        steps = self.horizon - depth
        if steps <= 0:
            return 0.0
        if self.gamma == 1.0:
            return self.r_max * steps
        return self.r_max * (1.0 - self.gamma**steps) / (1.0 - self.gamma)


class ParticleBelief:
    """Weighted particle approximation of a belief.

    Weights are validated and normalized at construction. Sampling uses a
    cached cumulative table (with a fast path for uniform weights), so
    instances are treated as immutable by the solvers.
    """

    __slots__ = ("particles", "weights", "_cum", "_uniform")

    def __init__(self, particles: Sequence[State] | np.ndarray, weights: Sequence[float] | np.ndarray | None = None):
        n = len(particles)
        if n == 0:
            raise EmptyBeliefError("belief needs at least one particle")
        self.particles = particles
        if weights is None:
            w = np.full(n, 1.0 / n)
            self._uniform = True
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != (n,):
                raise ValueError(f"got {n} particles but weight shape {w.shape}")
            if not np.all(np.isfinite(w)) or np.any(w < 0.0):
                raise ValueError("weights must be finite and nonnegative")
            total = float(w.sum())
            if total <= 0.0:
                raise ValueError("weights must not sum to zero")
            w = w / total
            self._uniform = bool(np.all(w == w[0]))
        self.weights = w
        self._cum = None

    def __len__(self) -> int:
        return len(self.particles)

    def sample(self, rng: RandomStream) -> State:
        """Draw one particle with probability equal to its weight."""
        n = len(self.particles)
        if self._uniform:
            return self.particles[int(rng.random() * n)]
        if self._cum is None:
            self._cum = np.cumsum(self.weights)
        idx = int(np.searchsorted(self._cum, rng.random(), side="right"))
        return self.particles[min(idx, n - 1)]

    def mean(self) -> float:
        """Weighted mean, defined for scalar-state beliefs."""
        return float(np.dot(self.weights, np.asarray(self.particles, dtype=float)))


def sample_particle(belief: ParticleBelief, rng: RandomStream) -> State:
    """Draw one particle from ``belief`` proportionally to its weight."""
    return belief.sample(rng)


def discounted_return(rewards: Sequence[float], gamma: float) -> float:
    """Sum of ``gamma**t * rewards[t]``, evaluated by Horner's rule."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    total = 0.0
    for r in reversed(rewards):
        total = r + gamma * total
    return total


def systematic_resample(weights: np.ndarray, n: int, rng: RandomStream) -> np.ndarray:
    """Indices of a systematic resample: one uniform offset, ``n`` even strata."""
    positions = (rng.random() + np.arange(n)) / n
    return np.searchsorted(np.cumsum(weights), positions, side="right").clip(max=len(weights) - 1)


def particle_filter_step(
    belief: ParticleBelief,
    action: int,
    obs: Observation,
    model: GenerativeModel,
    n_particles: int,
    rng: RandomStream,
    info: dict | None = None,
) -> ParticleBelief:
    """One bootstrap-filter update: propagate, reweight by the observation
    density, and systematically resample down to ``n_particles`` equal-weight
    particles.

    If every propagated particle has zero likelihood the filter falls back to
    uniform weights over the propagated set and records
    ``info["degenerate_filter"] = True`` so callers can surface the event.
    """
    if n_particles < 1:
        raise ValueError("n_particles must be >= 1")
    transition_many = getattr(model, "transition_many", None)
    if transition_many is not None:
        prop = transition_many(np.asarray(belief.particles), action, rng)
    else:
        prop = [model.transition(s, action, rng) for s in belief.particles]
    density_many = getattr(model, "obs_density_many", None)
    if density_many is not None:
        dens = np.asarray(density_many(np.asarray(prop), obs), dtype=float)
    else:
        dens = np.array([model.obs_density(s, obs) for s in prop], dtype=float)
    w = belief.weights * dens
    total = float(w.sum())
    if total <= 0.0 or not np.isfinite(total):
        if info is not None:
            info["degenerate_filter"] = True
        w = np.full(len(dens), 1.0 / len(dens))
    else:
        w = w / total
    idx = systematic_resample(w, n_particles, rng)
    if isinstance(prop, np.ndarray):
        return ParticleBelief(prop[idx])
    return ParticleBelief([prop[i] for i in idx])
