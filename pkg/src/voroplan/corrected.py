"""Particle-belief tree search with a polynomial exploration bonus.

Classic UCT-style searches use a sqrt-log bonus, which does not survive the
maximum/backup operators of a tree with noisy leaf estimates. Here the bonus
is polynomial in the visit counts,

    B(h, a) = scale(depth) * N(h)^p_h / N(h, a)^(1-eta),

with ``p_h = eta * (1 - eta)`` in practical mode (the scale is ``c0`` times
the remaining discounted reward) and ``p_h = alpha/xi`` taken from a
validated parameter ladder in theoretical mode, where the tail guarantees
are proved. Unvisited actions have infinite bonus; ties break to the lowest
action index.

Observations are used as history keys verbatim, so this solver targets
discrete observation spaces; the progressive-widening variants live in
``pomcpow``.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from .certificate import ParameterLadder, validate_ladder
from .core import GenerativeModel, ParticleBelief, PlanningConfig, RandomStream, State


class BonusBelowLeafError(ValueError):
    """Bonus requested at or below the leaf depth, where no action is taken."""


@dataclass
class BonusParams:
    """Exploration-bonus configuration shared by the tree solvers.

    ``mode`` is ``"practical"`` (scale ``c0 * V_max(depth)``, exponent
    ``eta(1-eta)``) or ``"theoretical"`` (scales and exponents read off a
    validated ladder). Depth-indexed tables are precomputed so the per-node
    cost is two ``pow`` calls.
    """

    mode: str
    plan: PlanningConfig
    eta: float = 0.5
    c0: float = 1.0
    ladder: ParameterLadder | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("practical", "theoretical"):
            raise ValueError(f"mode must be 'practical' or 'theoretical', got {self.mode!r}")
        if not 0.5 <= self.eta < 1.0:
            raise ValueError(f"eta must be in [0.5, 1), got {self.eta}")
        horizon = self.plan.horizon
        if self.mode == "theoretical":
            if self.ladder is None:
                raise ValueError("theoretical mode needs a parameter ladder")
            validate_ladder(self.ladder)
            if self.ladder.horizon < horizon:
                raise ValueError(
                    f"ladder covers {self.ladder.horizon} levels but the search is {horizon} deep"
                )
            if not math.isclose(self.ladder.eta, self.eta, rel_tol=1e-12, abs_tol=1e-12):
                raise ValueError(f"ladder eta {self.ladder.eta} disagrees with bonus eta {self.eta}")
        if self.c0 <= 0.0:
            raise ValueError(f"c0 must be positive, got {self.c0}")
        self.exp_nha = 1.0 - self.eta
        if self.mode == "practical":
            self.scale = tuple(self.c0 * self.plan.v_max(d) for d in range(horizon))
            self.exp_nh = tuple(self.eta * (1.0 - self.eta) for _ in range(horizon))
        else:
            # The node at depth d backs up estimates that are `horizon - d`
            # levels above the leaves; its children sit one level lower.
            child_level = [horizon - d - 1 for d in range(horizon)]
            self.scale = tuple(
                self.ladder.beta0 ** (1.0 / self.ladder.xi_at(lv + 1)) for lv in child_level
            )
            self.exp_nh = tuple(
                self.ladder.alpha_at(lv + 1) / self.ladder.xi_at(lv + 1) for lv in child_level
            )


def bonus(params: BonusParams, depth: int, n_h: int, n_ha: int) -> float:
    """Exploration bonus for an action tried ``n_ha`` times at a depth-``depth``
    node visited ``n_h`` times. Infinite while the action is unvisited."""
    if depth >= params.plan.horizon or depth < 0:
        raise BonusBelowLeafError(f"no actions are selected at depth {depth} of a depth-{params.plan.horizon} search")
    if n_ha == 0:
        return math.inf
    return params.scale[depth] * n_h ** params.exp_nh[depth] / n_ha**params.exp_nha


class TreeNode:
    """Per-history search statistics: visit counts, running action-value
    means, and children keyed by (action, observation token)."""

    __slots__ = ("depth", "n", "n_a", "q_a", "children", "expanded")

    def __init__(self, depth: int, n_actions: int):
        self.depth = depth
        self.n = 0
        self.n_a = [0] * n_actions
        self.q_a = [0.0] * n_actions
        self.children: dict = {}
        self.expanded = False

    def child(self, action: int, token) -> "TreeNode":
        key = (action, token)
        node = self.children.get(key)
        if node is None:
            node = TreeNode(self.depth + 1, len(self.n_a))
            self.children[key] = node
        return node

    def value(self) -> float:
        """Visit-weighted mean of the backed-up totals at this node."""
        if self.n == 0:
            return 0.0
        return sum(n * q for n, q in zip(self.n_a, self.q_a)) / self.n


def select_action(node: TreeNode, params: BonusParams) -> int:
    """argmax of Q + bonus; unvisited actions win immediately (lowest index
    first), and exact ties also break to the lowest index."""
    n_a = node.n_a
    q_a = node.q_a
    best = 0
    best_score = -math.inf
    for a in range(len(n_a)):
        count = n_a[a]
        if count == 0:
            return a
        score = q_a[a] + bonus(params, node.depth, node.n, count)
        if score > best_score:
            best = a
            best_score = score
    return best


def rollout(state: State, depth: int, env: GenerativeModel, params: BonusParams, rng: RandomStream) -> float:
    """Uniform-random playout from ``depth`` to the horizon."""
    total = 0.0
    disc = 1.0
    gamma = params.plan.gamma
    n_actions = env.n_actions
    for _ in range(params.plan.horizon - depth):
        state, _, r = env.step(state, int(rng.random() * n_actions), rng)
        total += disc * r
        disc *= gamma
    return total


def simulate(
    state: State,
    node: TreeNode,
    depth: int,
    env: GenerativeModel,
    params: BonusParams,
    rng: RandomStream,
) -> float:
    """One search episode from ``state`` at ``node``; returns the sampled
    discounted total and updates the statistics along the path.

    A node reached for the first time is expanded (its statistics stay zero)
    and its value is estimated by a rollout; expanded nodes select an action
    with the corrected bonus and recurse.
    """
    if depth >= params.plan.horizon:
        return 0.0
    if not node.expanded:
        node.expanded = True
        return rollout(state, depth, env, params, rng)
    a = select_action(node, params)
    s2, z, r = env.step(state, a, rng)
    total = r + params.plan.gamma * simulate(s2, node.child(a, z), depth + 1, env, params, rng)
    node.n += 1
    count = node.n_a[a] + 1
    node.n_a[a] = count
    node.q_a[a] += (total - node.q_a[a]) / count
    return total


def search(
    belief: ParticleBelief,
    env: GenerativeModel,
    params: BonusParams,
    n_sims: int,
    rng: RandomStream,
) -> tuple[int, TreeNode]:
    """Run ``n_sims`` simulations from ``belief`` and return the greedy root
    action (argmax of the root Q values, ties to the lowest index) along with
    the root node.

    The root history is given, not discovered, so it is marked expanded up
    front; every simulation therefore contributes a root backup and
    ``root.n == n_sims`` afterwards.
    """
    if n_sims < 1:
        raise ValueError(f"n_sims must be >= 1, got {n_sims}")
    root = TreeNode(0, env.n_actions)
    root.expanded = True
    for _ in range(n_sims):
        simulate(belief.sample(rng), root, 0, env, params, rng)
    return greedy_action(root), root


def greedy_action(node: TreeNode) -> int:
    best = 0
    best_q = -math.inf
    for a, q in enumerate(node.q_a):
        if q > best_q:
            best = a
            best_q = q
    return best
