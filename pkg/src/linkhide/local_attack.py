"""Edge-deletion attacks on local similarity metrics."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import BudgetError, GraphError, MetricError, OracleTooLargeError
from .graph import Edge, Graph, edge_key
from .local_metrics import (
    LocalMetric,
    LocalObjective,
    TargetSet,
    local_similarity,
    parse_metric,
    row_denominator,
    similarity_value,
    total_similarity,
)

BRUTE_FORCE_LIMIT = 10**6
TIE_TOL = 1e-12


@dataclass
class AttackResult:
    """Outcome of one attack run.

    ``objective_trace[i]`` is the objective after the first ``i`` deletions,
    except for Local-ACT where it holds the ACT value reached with budget
    ``t = i`` (``nan`` when that budget could not be realised).
    """

    algorithm: str
    deleted_edges: list[Edge]
    objective_trace: list[float]
    final_objective: float
    bound_gap: float | None = None
    info: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["deleted_edges"] = [list(e) for e in self.deleted_edges]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AttackResult":
        d = dict(d)
        d["deleted_edges"] = [tuple(e) for e in d["deleted_edges"]]
        return cls(**d)

    def attacked_graph(self, g: Graph) -> Graph:
        return g.remove_edges(self.deleted_edges)


def _check_budget(k: int) -> int:
    if k < 0:
        raise BudgetError(f"budget must be non-negative, got {k}")
    return int(k)


def pick_best(values: np.ndarray) -> int | None:
    """Index of the largest positive value; ties go to the lowest index."""
    if not len(values):
        return None
    best = float(np.max(values))
    if not best > 0:
        return None
    tol = TIE_TOL * max(1.0, abs(best))
    return int(np.flatnonzero(values >= best - tol)[0])


# --- Approx-Local ---------------------------------------------------------------------


def _greedy_on_bound(obj: LocalObjective, which: str, k: int):
    x = obj.initial_state()
    chosen = []
    states = [x]
    for _ in range(k):
        i = pick_best(obj.marginals(x, which))
        if i is None:
            break
        x = obj.apply(x, i)
        chosen.append(obj.candidates[i])
        states.append(x)
    return chosen, states


def approx_local(g: Graph, metric, targets: TargetSet, k: int) -> AttackResult:
    """Greedy minimisation of the upper-bound relaxation of the objective.

    Each step deletes the candidate edge with the largest decrease of the
    upper bound (a monotone submodular gain). The returned objective is the
    exact one at the greedy solution. ``bound_gap`` is the upper bound there
    minus a lower-bound value: the smaller of the lower bound at the main
    solution and at the solution of the same greedy run on the lower-bound
    relaxation.
    """
    k = _check_budget(k)
    metric = parse_metric(metric)
    obj = LocalObjective(g, metric, targets, k)
    deleted, states = _greedy_on_bound(obj, "upper", k)
    trace = [obj.exact(x) for x in states]
    _, low_states = _greedy_on_bound(obj, "lower", k)
    upper = obj.upper(states[-1])
    # greedy on the lower bound is not exact; never report it above the
    # lower bound already reached by the main run
    lower = min(obj.lower(low_states[-1]), obj.lower(states[-1]))
    final = total_similarity(g.remove_edges(deleted), metric, targets)
    return AttackResult(
        algorithm="approx_local",
        deleted_edges=deleted,
        objective_trace=trace,
        final_objective=final,
        bound_gap=upper - lower,
        info={
            "metric": metric.value,
            "budget": k,
            "bound_upper": upper,
            "bound_lower": lower,
            "candidates": len(obj.candidates),
        },
    )


# --- single-link special cases --------------------------------------------------------


def _trace_single(g: Graph, metric, u: int, v: int, deleted: Sequence[Edge]) -> list[float]:
    trace = [local_similarity(g, metric, u, v)]
    cur = g
    for e in deleted:
        cur = cur.remove_edges([e])
        trace.append(local_similarity(cur, metric, u, v))
    return trace


def _link(g: Graph, link) -> tuple[int, int]:
    u, v = int(link[0]), int(link[1])
    TargetSet(((u, v, 1.0),)).validate(g)
    return u, v


def single_link_cnd(g: Graph, metric, link, k: int) -> AttackResult:
    """Optimal attack on one link for CN/AA/RA.

    Common neighbours are cut off in increasing order of degree, one edge
    (to ``u``) each.
    """
    metric = parse_metric(metric)
    if not metric.is_cnd:
        raise MetricError(f"single_link_cnd needs a CND metric, got {metric.value}")
    k = _check_budget(k)
    u, v = _link(g, link)
    order = sorted(g.common_neighbors(u, v), key=lambda w: (g.degree(w), w))
    deleted = [edge_key(w, u) for w in order[:k]]
    trace = _trace_single(g, metric, u, v, deleted)
    return AttackResult("single_link_cnd", deleted, trace, trace[-1], info={"metric": metric.value})


def single_link_wcn(g: Graph, metric, link, k: int) -> AttackResult:
    """Optimal attack on one link for the WCN metrics.

    All deletions cut distinct common neighbours; the only choice is how many
    of them are cut on ``u``'s side, found by scanning every split.
    """
    metric = parse_metric(metric)
    if metric.is_cnd:
        raise MetricError(f"single_link_wcn needs a WCN metric, got {metric.value}")
    k = _check_budget(k)
    u, v = _link(g, link)
    common = g.common_neighbors(u, v)
    k_eff = min(k, len(common))
    if k_eff < k:
        warnings.warn(
            f"budget {k} exceeds |N(u,v)| = {len(common)}; using {k_eff} deletions",
            stacklevel=2,
        )
    du, dv = g.degree(u), g.degree(v)
    remaining = [0] * (len(common) - k_eff)
    best_split, best_val = 0, math.inf
    for y in range(k_eff + 1):
        val = similarity_value(metric, du - y, dv - (k_eff - y), remaining)
        if val < best_val:
            best_split, best_val = y, val
    deleted = [edge_key(u, w) for w in common[:best_split]]
    deleted += [edge_key(v, w) for w in common[best_split:k_eff]]
    trace = _trace_single(g, metric, u, v, deleted)
    return AttackResult(
        "single_link_wcn",
        deleted,
        trace,
        trace[-1],
        info={"metric": metric.value, "u_side": best_split, "effective_budget": k_eff},
    )


# --- node-group special case ----------------------------------------------------------


def greedy_cnd_group(g: Graph, metric, group: Iterable[int], k: int) -> AttackResult:
    """Greedy-CND: hide every link inside a group of pairwise non-adjacent nodes.

    Each step lowers by one the row sum (a common neighbour's number of edges
    into the group) whose decrement reduces the objective most, deleting that
    neighbour's edge to the lowest-id group member it still touches.
    """
    metric = parse_metric(metric)
    if not metric.is_cnd:
        raise MetricError(f"greedy_cnd_group needs a CND metric, got {metric.value}")
    k = _check_budget(k)
    targets = TargetSet.group(group)
    if len(targets.nodes) < 2:
        raise GraphError("group needs at least two nodes")
    obj = LocalObjective(g, metric, targets, 0)
    ext = obj.row_ext

    def row_value(r: int, s: int) -> float:
        if s < 2:
            return 0.0
        return (s * (s - 1) / 2) / row_denominator(metric, s + ext[r])

    x = obj.initial_state()
    sums = x.sum(axis=1)
    deleted: list[Edge] = []
    trace = [obj.exact(x)]
    for _ in range(k):
        gains = np.array(
            [row_value(r, sums[r]) - row_value(r, sums[r] - 1) if sums[r] else 0.0
             for r in range(len(sums))]
        )
        r = pick_best(gains)
        if r is None:
            break
        j = int(np.flatnonzero(x[r])[0])
        e = edge_key(obj.rows[r], obj.cols[j])
        x = obj.apply(x, obj.index[e])
        sums[r] -= 1
        deleted.append(e)
        trace.append(obj.exact(x))
    final = total_similarity(g.remove_edges(deleted), metric, targets)
    return AttackResult("greedy_cnd_group", deleted, trace, final, info={"metric": metric.value})


# --- exact oracle ---------------------------------------------------------------------


def _objective_from_sets(nbrs: list[set[int]], metric: LocalMetric, links) -> float:
    total = 0.0
    for u, v, w in links:
        common = nbrs[u] & nbrs[v]
        if common:
            total += w * similarity_value(
                metric, len(nbrs[u]), len(nbrs[v]), [len(nbrs[c]) for c in common]
            )
    return total


def brute_force_candidates(g: Graph, targets: TargetSet, widen: bool = False) -> list[Edge]:
    """Edges between a target node and a node adjacent to two or more target nodes.

    With ``widen`` every edge incident to a target node is a candidate.
    """
    U = set(targets.nodes)
    out = set()
    for u in U:
        for w in g.neighbors(u):
            if widen or len(g.neighbor_set(w) & U) >= 2:
                out.add(edge_key(u, w))
    return sorted(out)


def brute_force_local(
    g: Graph, metric, targets: TargetSet, k: int, widen: bool = False
) -> AttackResult:
    """Exact minimiser over every deletion set of size at most ``k``.

    Ties go to the lexicographically smallest sorted edge tuple. Refuses to
    enumerate more than ``BRUTE_FORCE_LIMIT`` subsets.
    """
    metric = parse_metric(metric)
    k = _check_budget(k)
    targets.validate(g)
    cands = brute_force_candidates(g, targets, widen)
    kk = min(k, len(cands))
    count = sum(math.comb(len(cands), j) for j in range(kk + 1))
    if count > BRUTE_FORCE_LIMIT:
        raise OracleTooLargeError(
            f"{count} subsets of {len(cands)} candidate edges exceed the limit of {BRUTE_FORCE_LIMIT}"
        )
    nbrs = [set(g.neighbor_set(i)) for i in range(g.n)]
    links = targets.links
    best_val = _objective_from_sets(nbrs, metric, links)
    best_set: tuple[Edge, ...] = ()
    for size in range(1, kk + 1):
        for combo in itertools.combinations(cands, size):
            for a, b in combo:
                nbrs[a].discard(b)
                nbrs[b].discard(a)
            val = _objective_from_sets(nbrs, metric, links)
            for a, b in combo:
                nbrs[a].add(b)
                nbrs[b].add(a)
            tol = TIE_TOL * max(1.0, abs(best_val))
            if val < best_val - tol or (abs(val - best_val) <= tol and combo < best_set):
                best_val, best_set = val, combo
    deleted = list(best_set)
    trace = [_objective_from_sets(nbrs, metric, links)]
    for a, b in deleted:
        nbrs[a].discard(b)
        nbrs[b].discard(a)
        trace.append(_objective_from_sets(nbrs, metric, links))
    return AttackResult(
        "brute_force",
        deleted,
        trace,
        best_val,
        info={"metric": metric.value, "subsets": count, "candidates": len(cands)},
    )
