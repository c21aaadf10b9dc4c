import numpy as np
import pytest

from linkhide import Graph, TargetSet, closed_triads, greedy_base, random_del, total_act
from linkhide.baselines import incident_edges

from instances import SQUARE, TRIANGLE, random_connected, random_targets

H01 = TargetSet(((0, 1, 1.0),))


def test_random_del_is_seeded():
    g = random_connected(np.random.default_rng(60), 30, 0.15)
    t = random_targets(np.random.default_rng(61), g, 3)
    a = random_del(g, t, 5, seed=4)
    b = random_del(g, t, 5, seed=4)
    c = random_del(g, t, 5, seed=5)
    assert a.deleted_edges == b.deleted_edges
    assert a.deleted_edges != c.deleted_edges


def test_random_del_only_touches_targets():
    g = random_connected(np.random.default_rng(62), 30, 0.15)
    t = random_targets(np.random.default_rng(63), g, 3)
    r = random_del(g, t, 8, seed=0)
    assert all(set(e) & set(t.nodes) for e in r.deleted_edges)


def test_random_del_exhausts_candidates():
    r = random_del(SQUARE, H01, 10, seed=0)
    assert sorted(r.deleted_edges) == incident_edges(SQUARE, H01)
    assert r.final_objective == 0.0


def test_random_del_budgets_nest():
    g = random_connected(np.random.default_rng(64), 25, 0.2)
    t = random_targets(np.random.default_rng(65), g, 2)
    big = random_del(g, t, 10, seed=3)
    small = random_del(g, t, 4, seed=3)
    assert big.deleted_edges[:4] == small.deleted_edges
    assert big.objective_trace[:5] == small.objective_trace


def test_random_del_preserving_connectivity():
    g = random_connected(np.random.default_rng(66), 25, 0.1)
    t = random_targets(np.random.default_rng(67), g, 3)
    r = random_del(g, t, 15, seed=1, metric="act", preserve_connectivity=True)
    assert g.remove_edges(r.deleted_edges).is_connected()
    assert r.final_objective == pytest.approx(total_act(g.remove_edges(r.deleted_edges), t))


def test_closed_triads_counts_triangles_on_target_pairs():
    t = TargetSet(((0, 1, 1.0),), allow_adjacent=True)
    assert closed_triads(TRIANGLE, t) == 1
    assert closed_triads(SQUARE, H01) == 0


def test_greedy_base_square_falls_back_to_smallest_edge():
    r = greedy_base(SQUARE, H01, 1)
    assert r.deleted_edges == [(0, 2)]


def test_greedy_base_triangle_tie_break():
    t = TargetSet(((0, 1, 1.0),), allow_adjacent=True)
    r = greedy_base(TRIANGLE, t, 1)
    assert r.deleted_edges == [(0, 2)]
    assert r.info["triads_left"] == 0


def test_greedy_base_prefers_edges_closing_more_triads():
    # (0, 1) is a target link in two triangles via 2 and 3; node 4 hangs off 0
    g = Graph(5, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (0, 4)])
    t = TargetSet(((0, 1, 1.0),), allow_adjacent=True)
    r = greedy_base(g, t, 3)
    assert r.deleted_edges[:2] == [(0, 2), (0, 3)]
    assert (0, 1) not in r.deleted_edges


def test_greedy_base_is_deterministic_and_nested():
    g = random_connected(np.random.default_rng(68), 25, 0.2)
    t = random_targets(np.random.default_rng(69), g, 3)
    a = greedy_base(g, t, 6, metric="ra")
    assert a == greedy_base(g, t, 6, metric="ra")
    assert greedy_base(g, t, 3, metric="ra").deleted_edges == a.deleted_edges[:3]


def test_greedy_base_preserving_connectivity():
    g = random_connected(np.random.default_rng(70), 20, 0.05)
    t = random_targets(np.random.default_rng(71), g, 2)
    r = greedy_base(g, t, 10, metric="act", preserve_connectivity=True)
    assert g.remove_edges(r.deleted_edges).is_connected()


@pytest.mark.parametrize("fn", [random_del, greedy_base])
def test_budget_respected(fn):
    g = random_connected(np.random.default_rng(72), 20, 0.2)
    t = random_targets(np.random.default_rng(73), g, 2)
    kw = {"seed": 0} if fn is random_del else {}
    for k in (0, 1, 5):
        r = fn(g, t, k, **kw)
        assert len(r.deleted_edges) <= k
        assert len(r.objective_trace) == len(r.deleted_edges) + 1
