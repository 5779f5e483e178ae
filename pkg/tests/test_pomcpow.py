import math

import numpy as np
import pytest
from conftest import (
    assert_counts_consistent_pomcpow,
    assert_counts_consistent_voro,
    iter_pomcpow_nodes,
    iter_voro_nodes,
)

from voroplan.core import ParticleBelief, PlanningConfig
from voroplan.corrected import BonusParams
from voroplan.envs import ModifiedLightDark, OriginalLightDark
from voroplan.pomcpow import (
    PomcpowEdge,
    PomcpowParams,
    PwParams,
    _pick_child,
    collect_telemetry,
    pomcpow_search,
    voro_search,
)

LIGHT = ModifiedLightDark()


def practical(horizon: int = 2, gamma: float = 0.5) -> BonusParams:
    return BonusParams(mode="practical", plan=PlanningConfig(gamma=gamma, horizon=horizon, r_max=1.0))


class ScriptedLine:
    """Deterministic two-action chain whose observation equals the next state."""

    n_actions = 2
    obs_box = (0.0, 10.0)

    def step(self, state, action, rng):
        s2 = state + (1.0 if action else 0.5)
        return s2, s2, 1.0


def test_pw_params_validation():
    with pytest.raises(ValueError):
        PwParams(k_z=0.0)
    with pytest.raises(ValueError):
        PwParams(alpha_z=0.0)
    with pytest.raises(ValueError):
        PwParams(alpha_z=1.0001)


# ---------------------------------------------------------------------------
# Voronoi-keyed search on the scripted chain


def test_duplicate_observations_reuse_the_cell():
    env = ScriptedLine()
    params = practical(horizon=1)
    action, root, tel = voro_search(
        ParticleBelief([0.0]), env, params, PwParams(k_z=8.0, alpha_z=0.5), n_sims=4, rng=np.random.default_rng(0)
    )
    # the widening budget never closes, but the repeated observation is a
    # bit-identical duplicate, so each edge keeps exactly one cell
    assert action == 0  # equal values tie to the lowest index
    assert root.n == 4
    assert [e.n for e in root.edges] == [2, 2]
    assert [e.q for e in root.edges] == [1.0, 1.0]
    assert [e.partition.m for e in root.edges] == [1, 1]
    assert [e.partition.duplicate_adds for e in root.edges] == [1, 1]
    assert [len(e.cells) for e in root.edges] == [1, 1]
    assert root.edges[0].cells[0].center == 0.5
    assert root.edges[0].cells[0].visits == 2
    assert root.edges[0].cells[0].particles == [0.5, 0.5]

    assert tel.n_sims == 4
    assert tel.duplicate_adds == 2
    assert tel.m_max == 1
    assert tel.total_cells == 2
    assert tel.edge_count == 2
    assert tel.depth_l_histories == 2  # horizon-1 == 0, so root cells count
    assert tel.radius_max == pytest.approx(9.5, abs=0)  # box (0, 10) around center 0.5
    assert tel.cells_by_depth() == [2]
    assert tel.m_max_by_depth() == [1]


def test_closed_budget_routes_to_nearest_cell_and_recurses():
    env = ScriptedLine()
    params = practical(horizon=2, gamma=0.5)
    pw = PwParams(k_z=0.5, alpha_z=1.0)  # closes after the first cell
    action, root, tel = voro_search(ParticleBelief([0.0]), env, params, pw, n_sims=3, rng=np.random.default_rng(0))

    edge0 = root.edges[0]
    assert edge0.n == 2
    # sim 1 scored the fresh cell by rollout (reward 1, then one rolled-out
    # step of reward 1): 1 + 0.5*1 = 1.5; sim 3 recursed into the cell's
    # subtree, whose depth-1 node also backed up 1.5
    assert edge0.q == pytest.approx(1.5, abs=0)
    assert edge0.cells[0].visits == 2
    child = edge0.cells[0].node
    assert child is not None and child.depth == 1
    assert child.n == 1
    assert child.edges[0].q == pytest.approx(1.0, abs=0)
    # the child's own cell hangs off a depth-1 edge: a horizon-depth history
    assert tel.depth_l_histories == 1
    assert tel.cells_by_depth() == [2, 1]
    assert tel.m_max_by_depth() == [1, 1]
    assert_counts_consistent_voro(root)


def test_voro_search_counts_consistent_on_lightdark():
    params = practical(horizon=3, gamma=0.95)
    rng = np.random.default_rng(7)
    belief = LIGHT.initial_belief(300, rng)
    _, root, tel = voro_search(belief, LIGHT, params, PwParams(), n_sims=400, rng=rng)
    checked = assert_counts_consistent_voro(root)
    assert checked > 1  # the search actually descended
    assert root.n == 400
    # every edge obeys the widening budget (the last grant can overshoot by one)
    for node in iter_voro_nodes(root):
        for edge in node.edges:
            if edge.partition.m:
                assert edge.partition.m <= 8.0 * max(edge.n, 1) ** 0.5 + 1.0
    assert tel.m_max >= 1
    assert tel.radius_max <= 3.0 + 1e-12  # cells cover a (-1.5, 1.5) window


def test_particles_follow_visits():
    params = practical(horizon=3, gamma=0.95)
    rng = np.random.default_rng(8)
    belief = LIGHT.initial_belief(200, rng)
    _, root, _ = voro_search(belief, LIGHT, params, PwParams(), n_sims=300, rng=rng)
    for node in iter_voro_nodes(root):
        for edge in node.edges:
            assert edge.n == sum(c.visits for c in edge.cells)
            assert edge.n == sum(len(c.particles) for c in edge.cells)
            for cell in edge.cells:
                if cell.node is not None:
                    assert cell.node.n <= cell.visits


def test_voro_search_deterministic_given_seed():
    params = practical(horizon=3, gamma=0.95)
    outcomes = []
    for _ in range(2):
        rng = np.random.default_rng(99)
        belief = LIGHT.initial_belief(150, rng)
        action, root, tel = voro_search(belief, LIGHT, params, PwParams(), n_sims=250, rng=rng)
        outcomes.append((action, root.n, [(e.n, e.q, e.partition.m) for e in root.edges], tel))
    assert outcomes[0] == outcomes[1]


def test_obs_box_falls_back_to_realized_centers():
    env = OriginalLightDark()
    assert getattr(env, "obs_box", None) is None
    params = practical(horizon=2, gamma=0.95)
    rng = np.random.default_rng(3)
    belief = env.initial_belief(100, rng)
    _, root, tel = voro_search(belief, env, params, PwParams(), n_sims=200, rng=rng)
    assert tel.edge_count >= 1
    assert math.isfinite(tel.radius_max) and tel.radius_max >= 0.0
    # explicit boxes are also accepted
    _, _, tel2 = voro_search(belief, env, params, PwParams(), 50, np.random.default_rng(3), obs_box=(-10.0, 10.0))
    assert tel2.radius_max > 0.0


def test_collect_telemetry_matches_manual_walk():
    params = practical(horizon=3, gamma=0.95)
    rng = np.random.default_rng(21)
    belief = LIGHT.initial_belief(200, rng)
    _, root, tel = voro_search(belief, LIGHT, params, PwParams(), n_sims=350, rng=rng)

    edges = [(n.depth, e) for n in iter_voro_nodes(root) for e in n.edges if e.partition.m]
    assert tel.edge_count == len(edges)
    assert tel.total_cells == sum(e.partition.m for _, e in edges)
    assert tel.m_max == max(e.partition.m for _, e in edges)
    assert tel.depth_l_histories == sum(e.partition.m for d, e in edges if d == 2)
    assert tel.duplicate_adds == sum(
        e.partition.duplicate_adds for n in iter_voro_nodes(root) for e in n.edges
    )
    rebuilt = collect_telemetry(root, 350, 3, LIGHT.obs_box)
    assert rebuilt == tel


def test_voro_search_rejects_empty_budget():
    with pytest.raises(ValueError):
        voro_search(ParticleBelief([0.0]), ScriptedLine(), practical(1), PwParams(), 0, np.random.default_rng(0))


# ---------------------------------------------------------------------------
# raw-observation baseline


class FixedU:
    """Stub stream returning a preset uniform draw."""

    def __init__(self, u: float):
        self.u = u

    def random(self):
        return self.u


def test_pick_child_is_visit_proportional():
    edge = PomcpowEdge()
    first = type("C", (), {"visits": 3})()
    second = type("C", (), {"visits": 1})()
    edge.children = [first, second]
    edge.child_visits = 4
    assert _pick_child(edge, FixedU(0.7)) is first  # 0.7*4 = 2.8 < 3
    assert _pick_child(edge, FixedU(0.76)) is second  # 3.04 >= 3
    assert _pick_child(edge, FixedU(0.999999)) is second


def test_log_bonus_requires_practical_scales():
    plan = PlanningConfig(gamma=0.95, horizon=2, r_max=1.0)
    from voroplan.certificate import build_ladder

    theo = BonusParams(mode="theoretical", plan=plan, ladder=build_ladder(2.0, 0.5, 2))
    with pytest.raises(ValueError):
        PomcpowParams(bonus=theo)
    PomcpowParams(bonus=theo, log_bonus=False)  # corrected bonus is fine


@pytest.mark.parametrize("log_bonus", [True, False])
def test_pomcpow_search_counts_consistent(log_bonus):
    params = PomcpowParams(bonus=practical(horizon=3, gamma=0.95), log_bonus=log_bonus)
    rng = np.random.default_rng(17)
    belief = LIGHT.initial_belief(300, rng)
    action, root = pomcpow_search(belief, LIGHT, params, PwParams(), n_sims=400, rng=rng)
    assert 0 <= action < 3
    assert root.n == 400
    assert_counts_consistent_pomcpow(root)
    for node in iter_pomcpow_nodes(root):
        for edge in node.edges:
            assert edge.child_visits == sum(c.visits for c in edge.children)
            assert len(edge.children) <= 8.0 * max(edge.n, 1) ** 0.5 + 1.0
            for child in edge.children:
                assert len(child.particles) == child.visits


def test_pomcpow_reroutes_once_budget_closes():
    env = ScriptedLine()
    params = PomcpowParams(bonus=practical(horizon=2, gamma=0.5))
    pw = PwParams(k_z=0.5, alpha_z=1.0)
    _, root = pomcpow_search(ParticleBelief([0.0]), env, params, pw, n_sims=3, rng=np.random.default_rng(0))
    edge0 = root.edges[0]
    assert len(edge0.children) == 1
    assert edge0.children[0].visits == 2
    assert edge0.children[0].node is not None
    assert edge0.children[0].node.n == 1


def test_pomcpow_deterministic_given_seed():
    params = PomcpowParams(bonus=practical(horizon=3, gamma=0.95))
    outcomes = []
    for _ in range(2):
        rng = np.random.default_rng(31)
        belief = LIGHT.initial_belief(150, rng)
        action, root = pomcpow_search(belief, LIGHT, params, PwParams(), n_sims=250, rng=rng)
        outcomes.append((action, root.n, [(e.n, e.q, len(e.children)) for e in root.edges]))
    assert outcomes[0] == outcomes[1]


def test_pomcpow_search_rejects_empty_budget():
    params = PomcpowParams(bonus=practical(horizon=2))
    with pytest.raises(ValueError):
        pomcpow_search(ParticleBelief([0.0]), ScriptedLine(), params, PwParams(), 0, np.random.default_rng(0))
