"""Progressive-widening tree searches for continuous observations.

``voro_search`` keys histories by Voronoi cell: each (history, action) edge
owns an incremental partition of the observation space, new observations
either open a new cell (while the widening budget allows) or are routed to
the nearest existing center, and the subtree below a cell conditions on the
stored center rather than the raw draw. ``pomcpow_search`` is the baseline
that keys children by the raw observations and re-routes by visit count once
widening closes.

Both use the corrected polynomial bonus from ``corrected`` for action
selection; the baseline can optionally use the classic sqrt-log bonus.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from .core import GenerativeModel, ParticleBelief, RandomStream, State
from .corrected import BonusParams, bonus, rollout
from .voronoi import VoronoiPartition, pw_allows


@dataclass(frozen=True)
class PwParams:
    """Observation-widening budget: a partition may grow while
    ``m <= k_z * N(h, a) ** alpha_z``."""

    k_z: float = 8.0
    alpha_z: float = 0.5

    def __post_init__(self) -> None:
        if self.k_z <= 0.0:
            raise ValueError(f"k_z must be positive, got {self.k_z}")
        if not 0.0 < self.alpha_z <= 1.0:
            raise ValueError(f"alpha_z must be in (0, 1], got {self.alpha_z}")


# ---------------------------------------------------------------------------
# Voronoi-partitioned solver


class Cell:
    """One Voronoi cell of an action edge: stored center, simulated next
    states that landed here, a value estimate, and the child node."""

    __slots__ = ("center", "node", "v", "visits", "particles")

    def __init__(self, center):
        self.center = center
        self.node: VoroNode | None = None
        self.v = 0.0
        self.visits = 0
        self.particles: list = []


class ActionEdge:
    __slots__ = ("n", "q", "partition", "cells")

    def __init__(self, dim: int = 1):
        self.n = 0
        self.q = 0.0
        self.partition = VoronoiPartition(dim=dim)
        self.cells: list[Cell] = []


class VoroNode:
    __slots__ = ("depth", "n", "edges")

    def __init__(self, depth: int, n_actions: int, dim: int = 1):
        self.depth = depth
        self.n = 0
        self.edges = [ActionEdge(dim) for _ in range(n_actions)]

    def value(self) -> float:
        if self.n == 0:
            return 0.0
        return sum(e.n * e.q for e in self.edges) / self.n


def _select_edge(node: VoroNode, params: BonusParams) -> int:
    best = 0
    best_score = -math.inf
    for a, edge in enumerate(node.edges):
        if edge.n == 0:
            return a
        score = edge.q + bonus(params, node.depth, node.n, edge.n)
        if score > best_score:
            best = a
            best_score = score
    return best


def voro_simulate(
    state: State,
    node: VoroNode,
    depth: int,
    env: GenerativeModel,
    params: BonusParams,
    pw: PwParams,
    rng: RandomStream,
) -> float:
    """One simulation through the Voronoi-keyed tree.

    While the widening budget allows, the sampled observation becomes a new
    cell center and the new cell is scored by a rollout; otherwise the
    observation is assigned to its nearest center and the search recurses
    into that cell's subtree (lazily created). The simulated next state is
    appended to the chosen cell's particle set either way.
    """
    if depth >= params.plan.horizon:
        return 0.0
    a = _select_edge(node, params)
    edge = node.edges[a]
    s2, z, r = env.step(state, a, rng)
    partition = edge.partition
    if pw_allows(partition.m, edge.n, pw.k_z, pw.alpha_z):
        idx = partition.add_center(z)
        if idx == len(edge.cells):
            edge.cells.append(Cell(z))
        cell = edge.cells[idx]
        total = r + params.plan.gamma * rollout(s2, depth + 1, env, params, rng)
    else:
        cell = edge.cells[partition.assign(z)]
        if cell.node is None:
            cell.node = VoroNode(depth + 1, len(node.edges), partition.dim)
        total = r + params.plan.gamma * voro_simulate(s2, cell.node, depth + 1, env, params, pw, rng)
    cell.particles.append(s2)
    cell.visits += 1
    cell.v += (total - cell.v) / cell.visits
    node.n += 1
    edge.n += 1
    edge.q += (total - edge.q) / edge.n
    return total


@dataclass(frozen=True)
class EdgeStat:
    """Telemetry for one (history, action) edge with at least one cell."""

    depth: int
    n_ha: int
    m: int
    radius: float


@dataclass(frozen=True)
class SearchTelemetry:
    """Realized tree shape of one search, consumed by the certificate.

    ``depth_l_histories`` counts the distinct depth-``horizon`` histories the
    search instantiated: the cells hanging off depth ``horizon - 1`` edges.
    ``m_max`` is the largest realized per-edge cell count.
    """

    n_sims: int
    horizon: int
    edge_stats: tuple[EdgeStat, ...]
    depth_l_histories: int
    duplicate_adds: int

    @property
    def m_max(self) -> int:
        return max((e.m for e in self.edge_stats), default=0)

    @property
    def total_cells(self) -> int:
        return sum(e.m for e in self.edge_stats)

    @property
    def edge_count(self) -> int:
        return len(self.edge_stats)

    @property
    def radius_max(self) -> float:
        return max((e.radius for e in self.edge_stats), default=0.0)

    def cells_by_depth(self) -> list[int]:
        counts = [0] * self.horizon
        for e in self.edge_stats:
            counts[e.depth] += e.m
        return counts

    def m_max_by_depth(self) -> list[int]:
        out = [0] * self.horizon
        for e in self.edge_stats:
            out[e.depth] = max(out[e.depth], e.m)
        return out


def collect_telemetry(root: VoroNode, n_sims: int, horizon: int, obs_box) -> SearchTelemetry:
    """Walk the finished tree and summarize every edge that opened a cell."""
    stats: list[EdgeStat] = []
    leaf_histories = 0
    duplicates = 0
    stack = [root]
    while stack:
        node = stack.pop()
        for edge in node.edges:
            m = edge.partition.m
            duplicates += edge.partition.duplicate_adds
            if m == 0:
                continue
            radius = edge.partition.covering_radius(obs_box)
            stats.append(EdgeStat(depth=node.depth, n_ha=edge.n, m=m, radius=radius))
            if node.depth == horizon - 1:
                leaf_histories += m
            for cell in edge.cells:
                if cell.node is not None:
                    stack.append(cell.node)
    return SearchTelemetry(
        n_sims=n_sims,
        horizon=horizon,
        edge_stats=tuple(stats),
        depth_l_histories=leaf_histories,
        duplicate_adds=duplicates,
    )


def voro_search(
    belief: ParticleBelief,
    env: GenerativeModel,
    params: BonusParams,
    pw: PwParams,
    n_sims: int,
    rng: RandomStream,
    obs_box=None,
) -> tuple[int, VoroNode, SearchTelemetry]:
    """Run ``n_sims`` Voronoi-keyed simulations from ``belief``; returns the
    greedy root action, the root node, and the realized-tree telemetry."""
    if n_sims < 1:
        raise ValueError(f"n_sims must be >= 1, got {n_sims}")
    root = VoroNode(0, env.n_actions, getattr(env, "obs_dim", 1))
    for _ in range(n_sims):
        voro_simulate(belief.sample(rng), root, 0, env, params, pw, rng)
    if obs_box is None:
        obs_box = getattr(env, "obs_box", None)
    if obs_box is None:
        lo = min((min(e.partition.centers) for n in _iter_nodes(root) for e in n.edges if e.partition.m), default=0.0)
        hi = max((max(e.partition.centers) for n in _iter_nodes(root) for e in n.edges if e.partition.m), default=0.0)
        obs_box = (lo, hi)
    telemetry = collect_telemetry(root, n_sims, params.plan.horizon, obs_box)
    best = 0
    best_q = -math.inf
    for a, edge in enumerate(root.edges):
        if edge.q > best_q:
            best = a
            best_q = edge.q
    return best, root, telemetry


def _iter_nodes(root: VoroNode):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        for edge in node.edges:
            for cell in edge.cells:
                if cell.node is not None:
                    stack.append(cell.node)


# ---------------------------------------------------------------------------
# raw-observation baseline


class ObsChild:
    __slots__ = ("token", "node", "visits", "particles")

    def __init__(self, token, state):
        self.token = token
        self.node: PomcpowNode | None = None
        self.visits = 1
        self.particles = [state]


class PomcpowEdge:
    __slots__ = ("n", "q", "children", "child_visits")

    def __init__(self):
        self.n = 0
        self.q = 0.0
        self.children: list[ObsChild] = []
        self.child_visits = 0


class PomcpowNode:
    __slots__ = ("depth", "n", "edges")

    def __init__(self, depth: int, n_actions: int):
        self.depth = depth
        self.n = 0
        self.edges = [PomcpowEdge() for _ in range(n_actions)]

    def value(self) -> float:
        if self.n == 0:
            return 0.0
        return sum(e.n * e.q for e in self.edges) / self.n


@dataclass
class PomcpowParams:
    """Baseline configuration: the shared bonus parameters plus a switch
    between the classic sqrt-log bonus (default) and the corrected one."""

    bonus: BonusParams
    log_bonus: bool = True

    def __post_init__(self) -> None:
        if self.log_bonus and self.bonus.mode != "practical":
            raise ValueError("the sqrt-log bonus only uses the practical depth scales")


def _select_edge_pomcpow(node: PomcpowNode, params: PomcpowParams) -> int:
    if not params.log_bonus:
        best = 0
        best_score = -math.inf
        for a, edge in enumerate(node.edges):
            if edge.n == 0:
                return a
            score = edge.q + bonus(params.bonus, node.depth, node.n, edge.n)
            if score > best_score:
                best = a
                best_score = score
        return best
    scale = params.bonus.scale[node.depth]
    log_n = math.log(node.n) if node.n > 0 else 0.0
    best = 0
    best_score = -math.inf
    for a, edge in enumerate(node.edges):
        if edge.n == 0:
            return a
        score = edge.q + scale * math.sqrt(log_n / edge.n)
        if score > best_score:
            best = a
            best_score = score
    return best


def _pick_child(edge: PomcpowEdge, rng: RandomStream) -> ObsChild:
    """Visit-count-proportional draw among the edge's observation children."""
    u = rng.random() * edge.child_visits
    acc = 0
    for child in edge.children:
        acc += child.visits
        if u < acc:
            return child
    return edge.children[-1]


def pomcpow_simulate(
    state: State,
    node: PomcpowNode,
    depth: int,
    env: GenerativeModel,
    params: PomcpowParams,
    pw: PwParams,
    rng: RandomStream,
) -> float:
    """Baseline simulation: while the widening budget allows, the raw
    observation opens a new child (scored by rollout); afterwards a child is
    re-drawn proportionally to visit counts and the search recurses."""
    bonus_params = params.bonus
    if depth >= bonus_params.plan.horizon:
        return 0.0
    a = _select_edge_pomcpow(node, params)
    edge = node.edges[a]
    s2, z, r = env.step(state, a, rng)
    if pw_allows(len(edge.children), edge.n, pw.k_z, pw.alpha_z):
        edge.children.append(ObsChild(z, s2))
        edge.child_visits += 1
        total = r + bonus_params.plan.gamma * rollout(s2, depth + 1, env, bonus_params, rng)
    else:
        child = _pick_child(edge, rng)
        child.visits += 1
        edge.child_visits += 1
        child.particles.append(s2)
        if child.node is None:
            child.node = PomcpowNode(depth + 1, len(node.edges))
        total = r + bonus_params.plan.gamma * pomcpow_simulate(s2, child.node, depth + 1, env, params, pw, rng)
    node.n += 1
    edge.n += 1
    edge.q += (total - edge.q) / edge.n
    return total


def pomcpow_search(
    belief: ParticleBelief,
    env: GenerativeModel,
    params: PomcpowParams,
    pw: PwParams,
    n_sims: int,
    rng: RandomStream,
) -> tuple[int, PomcpowNode]:
    """Run ``n_sims`` baseline simulations and return the greedy root action
    (ties to the lowest index) and the root node."""
    if n_sims < 1:
        raise ValueError(f"n_sims must be >= 1, got {n_sims}")
    root = PomcpowNode(0, env.n_actions)
    for _ in range(n_sims):
        pomcpow_simulate(belief.sample(rng), root, 0, env, params, pw, rng)
    best = 0
    best_q = -math.inf
    for a, edge in enumerate(root.edges):
        if edge.q > best_q:
            best = a
            best_q = edge.q
    return best, root
