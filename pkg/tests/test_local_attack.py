import math
import warnings

import numpy as np
import pytest

from linkhide import (
    AttackResult,
    BudgetError,
    Graph,
    MetricError,
    OracleTooLargeError,
    TargetSet,
    approx_local,
    brute_force_local,
    greedy_cnd_group,
    single_link_cnd,
    single_link_wcn,
    total_similarity,
)
from linkhide.local_attack import brute_force_candidates
from linkhide.local_metrics import LocalMetric, similarity_value

from instances import SQUARE, group_instances, local_instances

CND = [m for m in LocalMetric if m.is_cnd]
WCN = [m for m in LocalMetric if not m.is_cnd]
H01 = TargetSet(((0, 1, 1.0),))


def check_result(g: Graph, r: AttackResult, k: int):
    assert len(r.deleted_edges) <= k
    assert len(set(r.deleted_edges)) == len(r.deleted_edges)
    assert all(e in g.edges for e in r.deleted_edges)
    assert len(r.objective_trace) == len(r.deleted_edges) + 1


# --- Approx-Local ---------------------------------------------------------------


def test_approx_local_square_cn_empties_neighbourhood():
    r = approx_local(SQUARE, "cn", H01, 2)
    assert r.final_objective == 0.0
    assert r.deleted_edges == [(0, 2), (0, 3)]
    assert r.objective_trace == [2.0, 1.0, 0.0]


def test_approx_local_zero_budget():
    r = approx_local(SQUARE, "ra", H01, 0)
    assert r.deleted_edges == []
    assert r.objective_trace == [total_similarity(SQUARE, "ra", H01)]
    assert r.bound_gap == pytest.approx(0.0, abs=1e-12)


def test_approx_local_without_candidates():
    g = Graph(4, [(0, 2), (1, 3)])
    r = approx_local(g, "jaccard", H01, 3)
    assert r.deleted_edges == [] and r.final_objective == 0.0


def test_approx_local_negative_budget():
    with pytest.raises(BudgetError):
        approx_local(SQUARE, "cn", H01, -1)


@pytest.mark.parametrize("metric", list(LocalMetric))
def test_approx_local_result_invariants(metric):
    for g, t in local_instances(seed=30, count=40, n_range=(6, 12), pairs=(1, 3), weighted=True):
        k = 3
        r = approx_local(g, metric, t, k)
        check_result(g, r, k)
        assert r.final_objective == pytest.approx(
            total_similarity(g.remove_edges(r.deleted_edges), metric, t), abs=1e-12
        )
        assert r.final_objective == pytest.approx(r.objective_trace[-1], abs=1e-12)
        assert r.bound_gap >= 0.0
        assert r.info["bound_lower"] <= r.final_objective + 1e-12
        assert r.final_objective <= r.info["bound_upper"] + 1e-12


@pytest.mark.parametrize("metric", CND)
def test_approx_local_trace_non_increasing_for_cnd(metric):
    for g, t in local_instances(seed=31, count=60, n_range=(6, 12), pairs=(1, 4)):
        trace = approx_local(g, metric, t, 4).objective_trace
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))


def test_wcn_trace_can_rise_with_several_targets():
    # deleting (2, 3) hides (0, 3) but lowers d(2), which raises Sorensen(1, 2)
    g = Graph(6, [(0, 4), (3, 4), (1, 5), (2, 5), (2, 3)])
    t = TargetSet(((0, 3, 1.0), (1, 2, 1.0)))
    before = total_similarity(g, "sorensen", t)
    after = total_similarity(g.remove_edges([(3, 4)]), "sorensen", t)
    assert after < before
    mixed = TargetSet(((1, 2, 1.0), (0, 3, 1.0), (2, 4, 1.0)))
    base = total_similarity(g, "sorensen", mixed)
    assert total_similarity(g.remove_edges([(2, 3)]), "sorensen", mixed) > base


def test_approx_local_cn_certificate_sample():
    ratio = 1 - 1 / math.e
    for g, t in local_instances(seed=32, count=25, n_range=(6, 10), pairs=(1, 3)):
        k = 2
        f0 = total_similarity(g, "cn", t)
        greedy = f0 - approx_local(g, "cn", t, k).final_objective
        best = f0 - brute_force_local(g, "cn", t, k).final_objective
        assert greedy >= ratio * best - 1e-12


def test_bound_gap_is_not_always_a_certificate():
    # greedy on the lower bound misses its minimum here, so the distance to
    # the true optimum exceeds the reported gap
    g = Graph(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (2, 3)])
    t = TargetSet(((0, 1, 3.0), (2, 4, 2.0), (3, 4, 3.0)))
    r = approx_local(g, "leicht", t, 2)
    opt = brute_force_local(g, "leicht", t, 2)
    assert r.final_objective - opt.final_objective == pytest.approx(1.5)
    assert r.bound_gap == pytest.approx(1.0)


def test_result_round_trip():
    r = approx_local(SQUARE, "aa", H01, 1)
    back = AttackResult.from_dict(r.to_dict())
    assert back == r
    assert back.attacked_graph(SQUARE).m == 3


# --- single link ---------------------------------------------------------------------


def test_single_link_cnd_ra_example():
    # u=0, v=1; a=2 has degree 2, b=3 has degree 5
    g = Graph(7, [(0, 2), (1, 2), (0, 3), (1, 3), (3, 4), (3, 5), (3, 6)])
    r = single_link_cnd(g, "ra", (0, 1), 1)
    assert r.deleted_edges == [(0, 2)]
    assert r.objective_trace == pytest.approx([1 / 2 + 1 / 5, 1 / 5])


@pytest.mark.parametrize("metric", CND)
def test_single_link_cnd_large_budget_empties(metric):
    r = single_link_cnd(SQUARE, metric, (0, 1), 5)
    assert r.final_objective == 0.0 and len(r.deleted_edges) == 2


def test_single_link_cnd_rejects_wcn():
    with pytest.raises(MetricError):
        single_link_cnd(SQUARE, "jaccard", (0, 1), 1)
    with pytest.raises(MetricError):
        single_link_wcn(SQUARE, "cn", (0, 1), 1)


def test_single_link_wcn_symmetric_sorensen():
    # d(u) = d(v) = 4 and |N| = 3: every split gives 2(|N|-k)/(d(u)+d(v)-k)
    g = Graph(9, [(0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (1, 3), (1, 4), (1, 6)])
    r = single_link_wcn(g, "sorensen", (0, 1), 2)
    assert r.final_objective == pytest.approx(2 * (3 - 2) / (8 - 2))
    assert r.info["u_side"] == 0


def test_single_link_wcn_hpi_split_by_scan():
    # d(u)=3, d(v)=8, |N|=3, k=2: values for y2 = 0, 1, 2 are 1/3, 1/2, 1
    g = Graph(12, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)] + [(1, x) for x in range(5, 10)])
    du, dv = g.degree(0), g.degree(1)
    assert (du, dv) == (3, 8)
    scan = [similarity_value(LocalMetric.HPI, du - y, dv - (2 - y), [0]) for y in range(3)]
    assert scan == pytest.approx([1 / 3, 1 / 2, 1.0])
    r = single_link_wcn(g, "hpi", (0, 1), 2)
    assert r.info["u_side"] == int(np.argmin(scan)) == 0
    assert r.final_objective == pytest.approx(1 / 3)
    assert r.final_objective == pytest.approx(brute_force_local(g, "hpi", H01, 2).final_objective)


def test_single_link_wcn_caps_budget_with_warning():
    with pytest.warns(UserWarning, match="exceeds"):
        r = single_link_wcn(SQUARE, "salton", (0, 1), 4)
    assert r.info["effective_budget"] == 2
    assert r.final_objective == 0.0


def test_single_link_wcn_uses_distinct_neighbours():
    for g, t in local_instances(seed=33, count=50):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = single_link_wcn(g, "jaccard", t.pairs()[0], 3)
        hubs = [w for e in r.deleted_edges for w in e if w not in t.pairs()[0]]
        assert len(hubs) == len(set(hubs))


@pytest.mark.parametrize("metric", list(LocalMetric))
def test_single_link_matches_oracle(metric):
    rng = np.random.default_rng(34)
    fn = single_link_cnd if metric.is_cnd else single_link_wcn
    for g, t in local_instances(seed=35, count=40):
        k = int(rng.integers(1, 4))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = fn(g, metric, t.pairs()[0], k)
        opt = brute_force_local(g, metric, t, k)
        assert r.final_objective == pytest.approx(opt.final_objective, abs=1e-12)


@pytest.mark.parametrize("metric", list(LocalMetric))
def test_candidate_restriction_loses_nothing_for_single_links(metric):
    for g, t in local_instances(seed=36, count=15, n_range=(5, 8)):
        narrow = brute_force_local(g, metric, t, 2)
        wide = brute_force_local(g, metric, t, 2, widen=True)
        assert narrow.final_objective == pytest.approx(wide.final_objective, abs=1e-12)


# --- Greedy-CND -------------------------------------------------------------------------


def test_greedy_cnd_prefers_heavier_row():
    # row 5 touches all three group nodes, row 6 touches one pair: first
    # decrement goes to row 5 (C(3,2)-C(2,2) = 2 versus 1)
    g = Graph(8, [(5, 0), (5, 1), (5, 2), (6, 0), (6, 1), (7, 2)])
    r = greedy_cnd_group(g, "cn", [0, 1, 2], 1)
    assert r.deleted_edges == [(0, 5)]
    assert r.objective_trace == [4.0, 2.0]


def test_greedy_cnd_zero_budget():
    r = greedy_cnd_group(SQUARE, "ra", [0, 1], 0)
    assert r.deleted_edges == [] and r.objective_trace == [1.0]


def test_greedy_cnd_stops_when_rows_exhausted():
    r = greedy_cnd_group(SQUARE, "cn", [0, 1], 10)
    assert len(r.deleted_edges) == 2 and r.final_objective == 0.0


@pytest.mark.parametrize("metric", CND)
def test_greedy_cnd_matches_oracle(metric):
    rng = np.random.default_rng(37)
    for g, group in group_instances(seed=38, count=40):
        k = int(rng.integers(1, 4))
        r = greedy_cnd_group(g, metric, group, k)
        check_result(g, r, k)
        opt = brute_force_local(g, metric, TargetSet.group(group), k)
        assert r.final_objective == pytest.approx(opt.final_objective, abs=1e-12)


def test_greedy_cnd_aa_counterexample():
    # row A touches 3 group nodes and nothing else; row B touches all 4 plus
    # 3 outside nodes. Spreading deletions beats greedy for AA at k = 2.
    group = [0, 1, 2, 3]
    a, b = 4, 5
    edges = [(a, 0), (a, 1), (a, 2)] + [(b, u) for u in group] + [(b, 6), (b, 7), (b, 8)]
    g = Graph(9, edges)
    t = TargetSet.group(group)
    f0 = total_similarity(g, "aa", t)
    greedy = greedy_cnd_group(g, "aa", group, 2)
    opt = brute_force_local(g, "aa", t, 2)
    assert f0 - greedy.final_objective == pytest.approx(2.697, abs=1e-3)
    assert f0 - opt.final_objective == pytest.approx(2.731, abs=1e-3)
    assert opt.final_objective < greedy.final_objective


# --- oracle -------------------------------------------------------------------------------


def test_oracle_square_examples():
    r = brute_force_local(SQUARE, "cn", H01, 1)
    assert r.final_objective == 1.0 and r.deleted_edges == [(0, 2)]
    r = brute_force_local(SQUARE, "cn", H01, 0)
    assert r.deleted_edges == [] and r.final_objective == 2.0


def test_oracle_guard():
    g = Graph(40, [(u, w) for u in (0, 1) for w in range(2, 40)])
    with pytest.raises(OracleTooLargeError, match="exceed"):
        brute_force_local(g, "cn", H01, 5)


def test_oracle_candidates():
    assert brute_force_candidates(SQUARE, H01) == [(0, 2), (0, 3), (1, 2), (1, 3)]
    g = SQUARE.remove_edges([(1, 3)])
    assert brute_force_candidates(g, H01) == [(0, 2), (1, 2)]
    assert brute_force_candidates(g, H01, widen=True) == [(0, 2), (0, 3), (1, 2)]


def test_oracle_beats_every_heuristic():
    for g, t in local_instances(seed=39, count=30, pairs=(1, 2)):
        for metric in ("cn", "ra", "sorensen", "hdi"):
            opt = brute_force_local(g, metric, t, 2).final_objective
            assert opt <= approx_local(g, metric, t, 2).final_objective + 1e-12
