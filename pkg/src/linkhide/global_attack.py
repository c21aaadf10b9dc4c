"""Attacks on the global metrics: Greedy-Katz and Local-ACT."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import networkx as nx
import numpy as np

from .errors import BudgetError, DisconnectedGraphError
from .global_metrics import KatzParams, katz_total, total_act
from .graph import Edge, Graph, edge_key
from .local_attack import TIE_TOL, AttackResult, _check_budget
from .local_metrics import TargetSet

PIVOT_TOL = 1e-10


# --- Greedy-Katz ----------------------------------------------------------------------


def _resolvent(g_adj: np.ndarray, beta: float) -> np.ndarray:
    return np.linalg.inv(np.eye(g_adj.shape[0]) - beta * g_adj)


def katz_deletion_gains(
    res: np.ndarray, beta: float, edges: np.ndarray, targets: TargetSet, adj: np.ndarray
) -> np.ndarray:
    """Decrease of the weighted target Katz sum from deleting each edge alone.

    ``res`` is (I - beta A)^{-1} for adjacency ``adj``. Removing edge (i, j)
    is a rank-2 update of I - beta A, so each candidate costs O(|targets|)
    via Woodbury. Candidates whose 2x2 capacitance pivot is tiny are
    recomputed from a fresh inverse.
    """
    a = np.array([u for u, _, _ in targets.links], dtype=np.int64)
    b = np.array([v for _, v, _ in targets.links], dtype=np.int64)
    w = np.array([x for _, _, x in targets.links])
    i, j = edges[:, 0], edges[:, 1]
    c11 = 1.0 + beta * res[j, i]
    c12 = beta * res[j, j]
    c21 = beta * res[i, i]
    c22 = 1.0 + beta * res[i, j]
    det = c11 * c22 - c12 * c21
    pai = res[np.ix_(a, i)]  # pairs x edges
    paj = res[np.ix_(a, j)]
    pjb = res[np.ix_(j, b)].T
    pib = res[np.ix_(i, b)].T
    safe = np.where(np.abs(det) < PIVOT_TOL, 1.0, det)
    quad = (pai * (c22 * pjb - c12 * pib) + paj * (c11 * pib - c21 * pjb)) / safe
    gains = beta * (w[:, None] * quad).sum(axis=0)
    bad = np.flatnonzero(np.abs(det) < PIVOT_TOL)
    if len(bad):
        base = float(w @ res[a, b])
        for e in bad:
            x, y = edges[e]
            mod = adj.copy()
            mod[x, y] = mod[y, x] = 0.0
            gains[e] = base - float(w @ _resolvent(mod, beta)[a, b])
    return gains


def greedy_katz(g: Graph, p: KatzParams | None, targets: TargetSet, k: int) -> AttackResult:
    """Greedy minimisation of the weighted Katz sum over all observed edges.

    The gain of a deletion set is monotone submodular, so ``k`` greedy steps
    reach at least (1 - 1/e) of the best achievable decrease.
    """
    k = _check_budget(k)
    targets.validate(g)
    if p is None:
        p = KatzParams.for_graph(g)
    adj = g.adjacency_matrix()
    p.check(adj)
    beta = p.beta
    edges = g.edge_list()
    alive = np.ones(len(edges), dtype=bool)
    edge_arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    res = _resolvent(adj, beta)
    trace = [katz_total(res, targets)]
    deleted: list[Edge] = []
    marginals = []
    for _ in range(min(k, len(edges))):
        idx = np.flatnonzero(alive)
        gains = katz_deletion_gains(res, beta, edge_arr[idx], targets, adj)
        best = float(gains.max())
        pos = int(np.flatnonzero(gains >= best - TIE_TOL * max(1.0, abs(best)))[0])
        e = int(idx[pos])
        alive[e] = False
        x, y = edges[e]
        adj[x, y] = adj[y, x] = 0.0
        res = _resolvent(adj, beta)
        deleted.append(edges[e])
        marginals.append(best)
        trace.append(katz_total(res, targets))
    return AttackResult(
        "greedy_katz",
        deleted,
        trace,
        trace[-1],
        info={"beta": beta, "marginals": marginals},
    )


# --- knapsack ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Allocation:
    z: tuple[int, ...]
    objective: float

    @property
    def budget_used(self) -> int:
        return sum(self.z)


def knapsack_allocate(
    D: Sequence[int], W: Sequence[float], t: int, strict: bool = True
) -> Allocation:
    """Exact maximiser of sum_i W_i / (D_i - z_i) subject to sum_i z_i <= t.

    Multiple-choice knapsack by dynamic programming over (node, budget left),
    in exact rational arithmetic so ties resolve to the lexicographically
    smallest ``z``. Each ``z_i`` is capped at ``min(t, D_i - 1)``; with
    ``strict`` a budget reaching any ``D_i`` is rejected outright, since the
    allocation model assumes no node is cut off.
    """
    t = _check_budget(t)
    if len(D) != len(W):
        raise ValueError("D and W must have equal length")
    if any(d < 1 for d in D):
        raise BudgetError("every node needs degree >= 1")
    if any(not w > 0 for w in W):
        raise BudgetError("weights must be positive")
    if strict and D and t >= min(D):
        raise BudgetError(
            f"budget {t} >= min degree {min(D)}: deleting that many edges at one "
            f"node could disconnect it, violating the connectivity assumption"
        )
    n = len(D)
    caps = [min(t, d - 1) for d in D]
    wf = [Fraction(w) for w in W]

    def val(i, z):
        return wf[i] / (D[i] - z)

    # best[i][b]: max value of nodes i..n-1 using at most b deletions
    best = [[Fraction(0)] * (t + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        nxt = best[i + 1]
        row = best[i]
        for b in range(t + 1):
            row[b] = max(val(i, z) + nxt[b - z] for z in range(min(caps[i], b) + 1))
    z_out = []
    b = t
    for i in range(n):
        for z in range(min(caps[i], b) + 1):
            if val(i, z) + best[i + 1][b - z] == best[i][b]:
                z_out.append(z)
                b -= z
                break
    return Allocation(tuple(z_out), float(best[0][t]) if n else 0.0)


# --- Local-ACT --------------------------------------------------------------------------


def node_weights(targets: TargetSet) -> list[float]:
    """W_i: total weight of target links touching each target node."""
    acc = {u: 0.0 for u in targets.nodes}
    for u, v, w in targets.links:
        acc[u] += w
        acc[v] += w
    return [acc[u] for u in targets.nodes]


def realize_allocation(g: Graph, targets: TargetSet, z: Sequence[int]) -> list[Edge] | None:
    """Pick the concrete edges for an allocation, or None if impossible.

    At target node ``u_i`` delete ``z_i`` edges, never to another target node
    and never a bridge of the current graph, lowest neighbour id first.
    """
    U = set(targets.nodes)
    h = g.to_networkx()
    out: list[Edge] = []
    for u, need in zip(targets.nodes, z):
        if not need:
            continue
        for x in sorted(h.neighbors(u)):
            if need == 0:
                break
            if x in U:
                continue
            h.remove_edge(u, x)
            try:
                nx.bidirectional_shortest_path(h, u, x)
            except nx.NetworkXNoPath:
                h.add_edge(u, x)
                continue
            out.append(edge_key(u, x))
            need -= 1
        if need:
            return None
    return out


@dataclass
class ActCandidate:
    t: int
    allocation: Allocation
    deleted: list[Edge] | None
    act: float


def act_profile(g: Graph, targets: TargetSet, k: int) -> list[ActCandidate]:
    """Allocate, realise and score every budget t = 0..k independently."""
    k = _check_budget(k)
    targets.validate(g)
    if not g.is_connected():
        raise DisconnectedGraphError("Local-ACT requires a connected graph")
    D = [g.degree(u) for u in targets.nodes]
    W = node_weights(targets)
    out = []
    for t in range(k + 1):
        alloc = knapsack_allocate(D, W, t, strict=False)
        deleted = realize_allocation(g, targets, alloc.z)
        if deleted is None:
            warnings.warn(f"allocation for t={t} cannot be realised without disconnecting; skipped",
                          stacklevel=2)
            act = math.nan
        else:
            act = total_act(g.remove_edges(deleted), targets)
        out.append(ActCandidate(t, alloc, deleted, act))
    return out


def best_from_profile(profile: Sequence[ActCandidate], k: int) -> AttackResult:
    usable = [c for c in profile[: k + 1] if c.deleted is not None]
    if not usable:
        raise BudgetError("no budget t <= k could be realised")
    best = usable[0]
    for c in usable[1:]:
        if c.act > best.act:
            best = c
    return AttackResult(
        "local_act",
        list(best.deleted),
        [c.act for c in profile[: k + 1]],
        best.act,
        info={
            "best_t": best.t,
            "allocation": list(best.allocation.z),
            "skipped_t": [c.t for c in profile[: k + 1] if c.deleted is None],
        },
    )


def local_act(g: Graph, targets: TargetSet, k: int) -> AttackResult:
    """Maximise total commute time of the targets with at most ``k`` deletions.

    Uses the degree approximation of effective resistance to allocate
    deletions per target node for each budget t <= k, then keeps the budget
    whose realised graph has the largest exact commute-time sum.
    """
    return best_from_profile(act_profile(g, targets, k), k)
