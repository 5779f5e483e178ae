"""Benchmark environments: two 1-D light-dark localization tasks and small
tabular POMDPs with explicit probability tables.

All environments expose the generative-model interface from ``core`` plus
vectorized ``transition_many`` / ``obs_density_many`` hooks used by the
particle filter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import ndtr

from .core import ParticleBelief, RandomStream, StateOutOfBoxError

_SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# truncated normal helpers


def sample_truncated_normal(rng: RandomStream, mu: float, sigma: float, lo: float, hi: float) -> float:
    """Rejection-sample N(mu, sigma^2) restricted to [lo, hi].

    Intended for windows that keep a healthy acceptance rate (all users here
    stay above ~0.4); bails out rather than spinning forever on a bad window.
    """
    for _ in range(10_000):
        x = mu + sigma * rng.standard_normal()
        if lo <= x <= hi:
            return x
    raise RuntimeError(f"truncated normal window [{lo}, {hi}] too tight for mu={mu}, sigma={sigma}")


def sample_truncated_normal_many(
    rng: RandomStream, mu: np.ndarray | float, sigma: np.ndarray | float, lo: float, hi: float, size: int
) -> np.ndarray:
    """Vectorized rejection sampler; mu/sigma may be scalars or length-``size`` arrays."""
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (size,)).copy()
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (size,)).copy()
    out = np.empty(size)
    pending = np.arange(size)
    for _ in range(10_000):
        draw = mu[pending] + sigma[pending] * rng.standard_normal(pending.size)
        ok = (draw >= lo) & (draw <= hi)
        out[pending[ok]] = draw[ok]
        pending = pending[~ok]
        if pending.size == 0:
            return out
    raise RuntimeError(f"truncated normal window [{lo}, {hi}] too tight for vectorized draw")


def truncated_normal_pdf(
    z: np.ndarray | float, mu: np.ndarray | float, sigma: np.ndarray | float, lo: float, hi: float
) -> np.ndarray | float:
    """Density of N(mu, sigma^2) truncated to [lo, hi]; zero outside the window."""
    z = np.asarray(z, dtype=float)
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    mass = ndtr((hi - mu) / sigma) - ndtr((lo - mu) / sigma)
    u = (z - mu) / sigma
    dens = np.exp(-0.5 * u * u) / (sigma * _SQRT_2PI * mass)
    dens = np.where((z >= lo) & (z <= hi), dens, 0.0)
    return float(dens) if dens.ndim == 0 else dens


# ---------------------------------------------------------------------------
# bounded light-dark task


@dataclass
class ModifiedLightDark:
    """Bounded 1-D light-dark localization with a dense shaped reward.

    The state lives in [-1, 1] with a light source at 0 (observation noise
    grows linearly with distance from it) and the goal region near
    ``x_goal``. Observations mix a truncated normal around the next state
    with a uniform floor over the window, so every in-window observation has
    density at least ``floor_weight / window width``. The reward is evaluated
    on the state the action is applied to and penalizes distance to the goal,
    actuation effort, and a tiny action-index tiebreaker; it stays within
    (0, 1].
    """

    actions: tuple[float, ...] = (-0.4, 0.0, 0.4)
    x_lo: float = -1.0
    x_hi: float = 1.0
    obs_lo: float = -1.5
    obs_hi: float = 1.5
    sigma_transition: float = 0.02
    w_max: float = 0.06
    sigma_base: float = 0.05
    sigma_slope: float = 0.30
    x_light: float = 0.0
    floor_weight: float = 0.05
    x_goal: float = 0.8
    effort_weight: float = 0.05
    tiebreak_weight: float = 1e-4
    init_mean: float = -0.6
    init_sigma: float = 0.15

    def __post_init__(self) -> None:
        self.n_actions = len(self.actions)
        self.r_max = 1.0
        # r_a(a) counts how many actions precede a in the tuple: 0, 1, 2.
        self._rank = tuple(float(i) for i in range(self.n_actions))
        self._width = self.obs_hi - self.obs_lo

    # -- dynamics ----------------------------------------------------------

    def sigma_obs(self, x: float | np.ndarray) -> float | np.ndarray:
        return self.sigma_base + self.sigma_slope * np.abs(x - self.x_light)

    def reward(self, x: float, action: int) -> float:
        a = self.actions[action]
        shaped = (
            abs(x - self.x_goal) / 2.0
            + self.effort_weight * abs(a) / 0.4
            + self.tiebreak_weight * self._rank[action]
        )
        return 1.0 - min(1.0, shaped)

    def transition(self, x: float, action: int, rng: RandomStream) -> float:
        w = sample_truncated_normal(rng, 0.0, self.sigma_transition, -self.w_max, self.w_max)
        x2 = x + self.actions[action] + w
        if x2 < self.x_lo:
            return self.x_lo
        if x2 > self.x_hi:
            return self.x_hi
        return x2

    def transition_many(self, xs: np.ndarray, action: int, rng: RandomStream) -> np.ndarray:
        w = sample_truncated_normal_many(rng, 0.0, self.sigma_transition, -self.w_max, self.w_max, xs.size)
        return np.clip(xs + self.actions[action] + w, self.x_lo, self.x_hi)

    def observe(self, x_next: float, rng: RandomStream) -> float:
        if rng.random() < self.floor_weight:
            return self.obs_lo + self._width * rng.random()
        sigma = self.sigma_base + self.sigma_slope * abs(x_next - self.x_light)
        return sample_truncated_normal(rng, x_next, sigma, self.obs_lo, self.obs_hi)

    def step(self, x: float, action: int, rng: RandomStream) -> tuple[float, float, float]:
        if not self.x_lo <= x <= self.x_hi:
            raise StateOutOfBoxError(f"state {x} outside [{self.x_lo}, {self.x_hi}]")
        r = self.reward(x, action)
        x2 = self.transition(x, action, rng)
        z = self.observe(x2, rng)
        return x2, z, r

    # -- densities and beliefs ---------------------------------------------

    def obs_density(self, x: float, z: float) -> float:
        if not self.obs_lo <= z <= self.obs_hi:
            return 0.0
        sigma = self.sigma_base + self.sigma_slope * abs(x - self.x_light)
        mass = ndtr((self.obs_hi - x) / sigma) - ndtr((self.obs_lo - x) / sigma)
        u = (z - x) / sigma
        core = math.exp(-0.5 * u * u) / (sigma * _SQRT_2PI * mass)
        return (1.0 - self.floor_weight) * core + self.floor_weight / self._width

    def obs_density_many(self, xs: np.ndarray, z: float) -> np.ndarray:
        sigma = self.sigma_obs(xs)
        core = truncated_normal_pdf(z, xs, sigma, self.obs_lo, self.obs_hi)
        return (1.0 - self.floor_weight) * core + self.floor_weight / self._width

    def sample_initial_state(self, rng: RandomStream) -> float:
        return sample_truncated_normal(rng, self.init_mean, self.init_sigma, self.x_lo, self.x_hi)

    def initial_belief(self, n_particles: int, rng: RandomStream) -> ParticleBelief:
        xs = sample_truncated_normal_many(rng, self.init_mean, self.init_sigma, self.x_lo, self.x_hi, n_particles)
        return ParticleBelief(xs)

    @property
    def obs_box(self) -> tuple[float, float]:
        return (self.obs_lo, self.obs_hi)


# ---------------------------------------------------------------------------
# classic unbounded light-dark task


@dataclass
class OriginalLightDark:
    """Unbounded 1-D light-dark task with Gaussian dynamics and cost
    ``-(|x'| + step cost)`` evaluated on the post-transition state."""

    actions: tuple[float, ...] = (-1.0, 0.0, 1.0)
    step_size: float = 1.0
    sigma_transition: float = 0.1
    sigma_base: float = 0.1
    sigma_slope: float = 0.5
    x_light: float = 0.0
    x_goal: float = 0.0
    step_cost: float = 0.1
    init_mean: float = 2.0
    init_sigma: float = 0.5
    # nominal reward scale used for bonus scaling; rewards themselves are unbounded below
    r_max: float = 3.0

    def __post_init__(self) -> None:
        self.n_actions = len(self.actions)

    def sigma_obs(self, x: float | np.ndarray) -> float | np.ndarray:
        return self.sigma_base + self.sigma_slope * np.abs(x - self.x_light)

    def transition(self, x: float, action: int, rng: RandomStream) -> float:
        return x + self.actions[action] * self.step_size + self.sigma_transition * rng.standard_normal()

    def transition_many(self, xs: np.ndarray, action: int, rng: RandomStream) -> np.ndarray:
        return xs + self.actions[action] * self.step_size + self.sigma_transition * rng.standard_normal(xs.size)

    def step(self, x: float, action: int, rng: RandomStream) -> tuple[float, float, float]:
        x2 = self.transition(x, action, rng)
        sigma = self.sigma_base + self.sigma_slope * abs(x2 - self.x_light)
        z = x2 + sigma * rng.standard_normal()
        r = -abs(x2 - self.x_goal) - self.step_cost
        return x2, z, r

    def obs_density(self, x: float, z: float) -> float:
        sigma = self.sigma_base + self.sigma_slope * abs(x - self.x_light)
        u = (z - x) / sigma
        return math.exp(-0.5 * u * u) / (sigma * _SQRT_2PI)

    def obs_density_many(self, xs: np.ndarray, z: float) -> np.ndarray:
        sigma = self.sigma_obs(xs)
        u = (z - xs) / sigma
        return np.exp(-0.5 * u * u) / (sigma * _SQRT_2PI)

    def sample_initial_state(self, rng: RandomStream) -> float:
        return self.init_mean + self.init_sigma * rng.standard_normal()

    def initial_belief(self, n_particles: int, rng: RandomStream) -> ParticleBelief:
        return ParticleBelief(self.init_mean + self.init_sigma * rng.standard_normal(n_particles))


# ---------------------------------------------------------------------------
# tabular POMDPs


@dataclass(frozen=True)
class TabularPOMDP:
    """Finite POMDP given by explicit tables.

    ``transition_probs[s, a, s']`` and ``obs_probs[s', z]`` are row-stochastic;
    every positive observation probability must be at least ``obs_floor`` so
    particle weights cannot collapse on a possible observation. Rewards are
    ``rewards[s, a]``, evaluated on the pre-transition state.
    """

    transition_probs: np.ndarray
    obs_probs: np.ndarray
    rewards: np.ndarray
    initial_belief_vec: np.ndarray
    obs_floor: float = 0.0

    def __post_init__(self) -> None:
        t = np.asarray(self.transition_probs, dtype=float)
        z = np.asarray(self.obs_probs, dtype=float)
        r = np.asarray(self.rewards, dtype=float)
        b0 = np.asarray(self.initial_belief_vec, dtype=float)
        object.__setattr__(self, "transition_probs", t)
        object.__setattr__(self, "obs_probs", z)
        object.__setattr__(self, "rewards", r)
        object.__setattr__(self, "initial_belief_vec", b0)
        s, a = r.shape
        if t.shape != (s, a, s):
            raise ValueError(f"transition table shape {t.shape} does not match rewards shape {r.shape}")
        if z.ndim != 2 or z.shape[0] != s:
            raise ValueError(f"observation table shape {z.shape} does not match {s} states")
        if b0.shape != (s,):
            raise ValueError(f"initial belief shape {b0.shape} does not match {s} states")
        for name, table, axis_sum in (("transition", t, t.sum(axis=2)), ("observation", z, z.sum(axis=1))):
            if not np.allclose(axis_sum, 1.0, atol=1e-12):
                raise ValueError(f"{name} rows must sum to 1")
            if np.any(table < 0.0):
                raise ValueError(f"{name} table has negative entries")
        if not math.isclose(float(b0.sum()), 1.0, abs_tol=1e-12) or np.any(b0 < 0.0):
            raise ValueError("initial belief must be a distribution")
        if not np.all(np.isfinite(r)):
            raise ValueError("rewards must be finite")
        if self.obs_floor > 0.0:
            positive = z[z > 0.0]
            if positive.size and float(positive.min()) < self.obs_floor - 1e-12:
                raise ValueError(f"positive observation probabilities must be >= {self.obs_floor}")
        # cached python-scalar tables keep the per-simulation sampling cheap
        object.__setattr__(self, "_t_cum", [[list(np.cumsum(t[si, ai])) for ai in range(a)] for si in range(s)])
        object.__setattr__(self, "_z_cum", [list(np.cumsum(z[si])) for si in range(s)])
        object.__setattr__(self, "_z_rows", [list(map(float, z[si])) for si in range(s)])
        object.__setattr__(self, "_r_rows", [list(map(float, r[si])) for si in range(s)])
        object.__setattr__(self, "_b0_cum", list(np.cumsum(b0)))

    @property
    def n_states(self) -> int:
        return self.rewards.shape[0]

    @property
    def n_actions(self) -> int:
        return self.rewards.shape[1]

    @property
    def n_obs(self) -> int:
        return self.obs_probs.shape[1]

    @property
    def r_max(self) -> float:
        return float(np.abs(self.rewards).max())

    @staticmethod
    def _pick(cum: list[float], u: float) -> int:
        for i, c in enumerate(cum):
            if u < c:
                return i
        return len(cum) - 1

    def transition(self, state: int, action: int, rng: RandomStream) -> int:
        return self._pick(self._t_cum[state][action], rng.random())

    def step(self, state: int, action: int, rng: RandomStream) -> tuple[int, int, float]:
        r = self._r_rows[state][action]
        s2 = self._pick(self._t_cum[state][action], rng.random())
        z = self._pick(self._z_cum[s2], rng.random())
        return s2, z, r

    def obs_density(self, state: int, obs: int) -> float:
        return self._z_rows[state][obs]

    def sample_initial_state(self, rng: RandomStream) -> int:
        return self._pick(self._b0_cum, rng.random())

    def initial_belief(self) -> ParticleBelief:
        """Exact initial belief: one particle per state, weighted by the prior."""
        return ParticleBelief(list(range(self.n_states)), self.initial_belief_vec)


def two_state_pomdp() -> TabularPOMDP:
    """Fixed 2-state / 2-action / 2-observation instance used by the tests and
    the concentration harness.

    Action 0 keeps state 0 (the only state rewarding action 0) sticky, action 1
    mostly swaps toward state 1; observations identify the state with
    0.8 / 0.75 accuracy and every entry clears the 0.2 floor. From the prior
    (0.85, 0.15) the depth-2 optimal root action is 0 by a wide margin.
    """
    return TabularPOMDP(
        transition_probs=np.array(
            [
                [[0.9, 0.1], [0.2, 0.8]],
                [[0.3, 0.7], [0.85, 0.15]],
            ]
        ),
        obs_probs=np.array([[0.8, 0.2], [0.25, 0.75]]),
        rewards=np.array([[1.0, 0.0], [0.0, 1.0]]),
        initial_belief_vec=np.array([0.85, 0.15]),
        obs_floor=0.2,
    )
