"""Comparison baselines: random deletion and closed-triad greedy."""

from __future__ import annotations

import networkx as nx
import numpy as np

from .graph import Edge, Graph, edge_key
from .local_attack import AttackResult, _check_budget
from .local_metrics import TargetSet
from .objectives import make_objective


def incident_edges(g: Graph, targets: TargetSet) -> list[Edge]:
    """Sorted edges touching at least one target node."""
    return sorted({edge_key(u, w) for u in targets.nodes for w in g.neighbors(u)})


def _is_bridge(h: nx.Graph, u: int, v: int) -> bool:
    h.remove_edge(u, v)
    try:
        nx.bidirectional_shortest_path(h, u, v)
        return False
    except nx.NetworkXNoPath:
        return True
    finally:
        h.add_edge(u, v)


def _trace(g: Graph, deleted, objective) -> list[float]:
    cur = g
    trace = [objective(cur)]
    for e in deleted:
        cur = cur.remove_edges([e])
        trace.append(objective(cur))
    return trace


def random_del(
    g: Graph,
    targets: TargetSet,
    k: int,
    seed: int,
    metric: str = "cn",
    preserve_connectivity: bool = False,
    objective=None,
) -> AttackResult:
    """Delete up to ``k`` uniformly random edges incident to target nodes.

    The deletion order is a seeded permutation of the candidate edges, so a
    smaller budget always yields a prefix of a larger one. With
    ``preserve_connectivity`` edges that are bridges at the time they come up
    are skipped. ``objective`` (graph -> float) defaults to ``metric``.
    """
    k = _check_budget(k)
    targets.validate(g)
    cands = incident_edges(g, targets)
    order = np.random.default_rng(seed).permutation(len(cands))
    if preserve_connectivity:
        h = g.to_networkx()
        deleted = []
        for i in order:
            if len(deleted) == k:
                break
            u, v = cands[i]
            if not _is_bridge(h, u, v):
                h.remove_edge(u, v)
                deleted.append(cands[i])
    else:
        deleted = [cands[i] for i in order[:k]]
    objective = objective or make_objective(metric, g, targets)
    trace = _trace(g, deleted, objective)
    return AttackResult("random_del", deleted, trace, trace[-1], info={"seed": seed})


def closed_triads(g: Graph, targets: TargetSet) -> int:
    """Triangles having both endpoints of some target link among their vertices."""
    return sum(
        len(g.common_neighbors(u, v)) for u, v, _ in targets.links if g.has_edge(u, v)
    )


def _triads_through(g: Graph, pairs, e: Edge) -> int:
    x, y = e
    count = 0
    for a, b in pairs:
        if (x in (a, b)) == (y in (a, b)) or not g.has_edge(a, b):
            continue
        partner = b if a in e else a
        third = y if x in (a, b) else x
        count += g.has_edge(third, partner)
    return count


def greedy_base(
    g: Graph,
    targets: TargetSet,
    k: int,
    metric: str = "cn",
    preserve_connectivity: bool = False,
    objective=None,
) -> AttackResult:
    """Closed-triad greedy heuristic.

    Each step deletes the edge incident to a target node (other than a
    target link itself) that destroys the most closed triads, ties and
    all-zero rounds going to the smallest edge.
    """
    k = _check_budget(k)
    targets.validate(g)
    pairs = {(u, v) for u, v, _ in targets.links}
    h = g.to_networkx() if preserve_connectivity else None
    cur = g
    deleted: list[Edge] = []
    for _ in range(k):
        scored = []
        for e in incident_edges(cur, targets):
            if e not in pairs:
                scored.append((-_triads_through(cur, pairs, e), e))
        scored.sort()
        best = None
        for _, e in scored:
            if h is None or not _is_bridge(h, *e):
                best = e
                break
        if best is None:
            break
        deleted.append(best)
        cur = cur.remove_edges([best])
        if h is not None:
            h.remove_edge(*best)
    objective = objective or make_objective(metric, g, targets)
    trace = _trace(g, deleted, objective)
    return AttackResult(
        "greedy_base", deleted, trace, trace[-1], info={"triads_left": closed_triads(cur, targets)}
    )
