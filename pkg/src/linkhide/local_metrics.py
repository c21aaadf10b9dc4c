"""Local similarity metrics, target sets and the decision-matrix view.

The nine metrics split into two families. CND metrics (CN, AA, RA) sum a
per-common-neighbour term that depends on that neighbour's degree. WCN
metrics divide the common-neighbour count by a function ``g`` of the
endpoint degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetError, GraphError, MetricError
from .graph import Edge, Graph, edge_key


class LocalMetric(str, Enum):
    CN = "cn"
    AA = "aa"
    RA = "ra"
    JACCARD = "jaccard"
    SORENSEN = "sorensen"
    SALTON = "salton"
    HPI = "hpi"
    HDI = "hdi"
    LEICHT = "leicht"

    @property
    def is_cnd(self) -> bool:
        return self in _CND

    @property
    def family(self) -> str:
        return "CND" if self.is_cnd else "WCN"


_CND = frozenset({LocalMetric.CN, LocalMetric.AA, LocalMetric.RA})
LOCAL_METRIC_NAMES = tuple(m.value for m in LocalMetric)


def parse_metric(name) -> LocalMetric:
    if isinstance(name, LocalMetric):
        return name
    try:
        return LocalMetric(str(name).strip().lower())
    except ValueError:
        raise MetricError(
            f"unknown local metric {name!r}; choose from {', '.join(LOCAL_METRIC_NAMES)}"
        ) from None


def classify(metric) -> str:
    return parse_metric(metric).family


# --- per-metric formulas ------------------------------------------------------


def row_denominator(metric: LocalMetric, degree: float) -> float:
    """Per-common-neighbour denominator f_r of a CND metric, given d(w)."""
    if metric is LocalMetric.CN:
        return 1.0
    if metric is LocalMetric.AA:
        return math.log(degree)
    if metric is LocalMetric.RA:
        return float(degree)
    raise MetricError(f"{metric.value} is not a CND metric")


def wcn_denominator(metric: LocalMetric, du: float, dv: float, n_common: float) -> float:
    """Denominator g(d(u), d(v), |N(u,v)|) of a WCN metric."""
    if metric is LocalMetric.JACCARD:
        return du + dv - n_common
    if metric is LocalMetric.SORENSEN:
        return (du + dv) / 2.0
    if metric is LocalMetric.SALTON:
        return math.sqrt(du * dv)
    if metric is LocalMetric.HPI:
        return float(min(du, dv))
    if metric is LocalMetric.HDI:
        return float(max(du, dv))
    if metric is LocalMetric.LEICHT:
        return float(du * dv)
    raise MetricError(f"{metric.value} is not a WCN metric")


def similarity_value(
    metric: LocalMetric, du: int, dv: int, common_degrees: Sequence[int]
) -> float:
    """Metric value from endpoint degrees and the degrees of common neighbours."""
    if not common_degrees:
        return 0.0
    if metric.is_cnd:
        return sum(1.0 / row_denominator(metric, d) for d in common_degrees)
    if du <= 0 or dv <= 0:
        raise MetricError(f"{metric.value} needs positive endpoint degrees")
    n = len(common_degrees)
    return n / wcn_denominator(metric, du, dv, n)


def local_similarity(g: Graph, metric, u: int, v: int) -> float:
    metric = parse_metric(metric)
    common = g.common_neighbors(u, v)
    return similarity_value(
        metric, g.degree(u), g.degree(v), [g.degree(w) for w in common]
    )


# --- target sets -----------------------------------------------------------------


@dataclass(frozen=True)
class TargetSet:
    """Target links ``(u, v, weight)`` with canonical ``u < v``.

    Target links are unobserved pairs, so by default a pair that is already
    an edge of the graph is rejected by :meth:`validate`.
    """

    links: tuple[tuple[int, int, float], ...]
    allow_adjacent: bool = False
    nodes: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seen = set()
        clean = []
        for link in self.links:
            if len(link) == 2:
                u, v, w = link[0], link[1], 1.0
            else:
                u, v, w = link
            key = edge_key(u, v)
            if key in seen:
                raise GraphError(f"duplicate target pair {key}")
            w = float(w)
            if not w > 0:
                raise GraphError(f"target weight must be positive, got {w} for {key}")
            seen.add(key)
            clean.append((key[0], key[1], w))
        object.__setattr__(self, "links", tuple(clean))
        object.__setattr__(self, "nodes", tuple(sorted({x for l in clean for x in l[:2]})))

    @classmethod
    def of(cls, pairs: Iterable, weights: Iterable[float] | None = None, **kw) -> "TargetSet":
        pairs = list(pairs)
        if weights is None:
            return cls(tuple(tuple(p) for p in pairs), **kw)
        return cls(tuple((p[0], p[1], w) for p, w in zip(pairs, weights, strict=True)), **kw)

    @classmethod
    def group(cls, nodes: Iterable[int], **kw) -> "TargetSet":
        """All pairs of a node group, unit weights."""
        nodes = sorted(set(nodes))
        return cls(
            tuple((a, b, 1.0) for i, a in enumerate(nodes) for b in nodes[i + 1 :]), **kw
        )

    def __len__(self) -> int:
        return len(self.links)

    def pairs(self) -> list[Edge]:
        return [(u, v) for u, v, _ in self.links]

    def validate(self, g: Graph) -> "TargetSet":
        for u, v, _ in self.links:
            if v >= g.n:
                raise GraphError(f"target ({u}, {v}) out of range for {g.n} nodes")
            if not self.allow_adjacent and g.has_edge(u, v):
                raise GraphError(f"target ({u}, {v}) is an observed edge")
        return self


def total_similarity(g: Graph, metric, targets: TargetSet) -> float:
    """Weighted sum of target-link similarities."""
    metric = parse_metric(metric)
    return sum(w * local_similarity(g, metric, u, v) for u, v, w in targets.links)


# --- decision matrix ------------------------------------------------------------


@dataclass(frozen=True)
class DecisionMatrix:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    x: np.ndarray
    external_degree: np.ndarray

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.cols)

    @property
    def row_sums(self) -> np.ndarray:
        return self.x.sum(axis=1)


def build_decision_matrix(g: Graph, targets: TargetSet) -> DecisionMatrix:
    cols = targets.nodes
    colset = set(cols)
    rows = []
    for w in range(g.n):
        if len(g.neighbor_set(w) & colset) >= 2:
            rows.append(w)
    x = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, w in enumerate(rows):
        nb = g.neighbor_set(w)
        for j, u in enumerate(cols):
            x[r, j] = u in nb
    ext = np.array([g.degree(w) for w in rows], dtype=np.int64) - x.sum(axis=1)
    return DecisionMatrix(tuple(rows), tuple(cols), x, ext)


def cnd_matrix_objective(metric, dm: DecisionMatrix, targets: TargetSet) -> float:
    """Row-sum form sum_r (1/f_r(S_r)) sum_ij w_ij x_ri x_rj of a CND metric."""
    metric = parse_metric(metric)
    col = {u: j for j, u in enumerate(dm.cols)}
    total = 0.0
    for r in range(dm.m):
        s = int(dm.x[r].sum())
        if s < 2:
            continue
        inner = sum(w * dm.x[r, col[a]] * dm.x[r, col[b]] for a, b, w in targets.links)
        if inner:
            total += inner / row_denominator(metric, s + int(dm.external_degree[r]))
    return total


# --- bounds -------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundPair:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper + 1e-12 * max(1.0, abs(self.upper)):
            raise ValueError(f"lower bound {self.lower} exceeds upper {self.upper}")

    @property
    def gap(self) -> float:
        return self.upper - self.lower


class LocalObjective:
    """Exact objective and its bounding relaxations over the decision matrix.

    The attack state is the set of deleted candidate edges, i.e. edges between
    a row node (adjacent to at least two target nodes) and a target node. An
    edge joining two target nodes may occupy two cells; both are cleared
    together. Denominators of the upper bound are the smallest values any
    state within ``budget`` deletions can reach while the term is non-zero;
    the lower bound keeps the original denominators.
    """

    def __init__(self, g: Graph, metric, targets: TargetSet, budget: int = 0):
        if budget < 0:
            raise BudgetError(f"budget must be non-negative, got {budget}")
        self.graph = g
        self.metric = metric = parse_metric(metric)
        self.targets = targets.validate(g)
        self.budget = int(budget)
        dm = build_decision_matrix(g, targets)
        self.matrix = dm
        self.x0 = dm.x.astype(bool)
        self.rows = dm.rows
        self.cols = dm.cols
        col = {u: j for j, u in enumerate(dm.cols)}
        row = {w: r for r, w in enumerate(dm.rows)}
        self.pair_a = np.array([col[u] for u, _, _ in targets.links], dtype=np.int64)
        self.pair_b = np.array([col[v] for _, v, _ in targets.links], dtype=np.int64)
        self.weights = np.array([w for _, _, w in targets.links], dtype=float)
        self.col_deg0 = np.array([g.degree(u) for u in dm.cols], dtype=np.int64)
        self.row_ext = dm.external_degree.astype(np.int64)

        cells: dict[Edge, list[tuple[int, int]]] = {}
        for r, w in enumerate(dm.rows):
            for j, u in enumerate(dm.cols):
                if self.x0[r, j]:
                    cells.setdefault(edge_key(w, u), []).append((r, j))
        self.candidates: list[Edge] = sorted(cells)
        self.cells = [tuple(cells[e]) for e in self.candidates]
        # endpoints that are target nodes, as column indices
        self.edge_cols = [
            tuple(col[x] for x in e if x in col) for e in self.candidates
        ]
        self.edge_rows = [tuple(row[x] for x in e if x in row) for e in self.candidates]
        self.row_deg0 = np.array([g.degree(w) for w in dm.rows], dtype=np.int64)
        self.index = {e: i for i, e in enumerate(self.candidates)}

        self.upper_coef, self.lower_coef = self._coefficients()

    # ---- denominators
    def _coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """Per (pair, row) weights w_p / denominator for both bounds."""
        m, k = len(self.rows), self.budget
        npairs = len(self.weights)
        if self.metric.is_cnd:
            s0 = self.x0.sum(axis=1)
            # A row node that is also a target node can lose candidate edges
            # outside its row, which lowers its external degree.
            touching = np.zeros(m, dtype=np.int64)
            for rows in self.edge_rows:
                for r in rows:
                    touching[r] += 1
            ext_loss = touching - s0

            def smallest_degree(r):
                # a contributing row keeps at least two target neighbours
                return min(
                    max(s0[r] - a, 2) + self.row_ext[r] - min(k - a, ext_loss[r])
                    for a in range(k + 1)
                )

            up_den = np.array(
                [row_denominator(self.metric, self.row_deg0[r]) for r in range(m)],
                dtype=float,
            )
            low_den = np.array(
                [row_denominator(self.metric, smallest_degree(r)) for r in range(m)],
                dtype=float,
            )
            if np.any(low_den <= 0):
                raise BudgetError(
                    f"budget {k} drives a {self.metric.value} row bound to zero; cap the budget"
                )
            lower = self.weights[:, None] / up_den[None, :] if m else np.zeros((npairs, 0))
            upper = self.weights[:, None] / low_den[None, :] if m else np.zeros((npairs, 0))
            return upper, lower
        # A target node only loses candidate edges, and while the pair still
        # has a common neighbour at least one of those survives.
        n_cand = np.zeros(len(self.cols), dtype=np.int64)
        for cols in self.edge_cols:
            for c in cols:
                n_cand[c] += 1
        floor = np.maximum(self.col_deg0 - n_cand + 1, 1)
        up_den = np.empty(npairs)
        low_den = np.empty(npairs)
        for p in range(npairs):
            a, b = self.pair_a[p], self.pair_b[p]
            du, dv = int(self.col_deg0[a]), int(self.col_deg0[b])
            fu, fv = int(floor[a]), int(floor[b])
            n0 = int(np.sum(self.x0[:, a] & self.x0[:, b]))
            up_den[p] = wcn_denominator(self.metric, du, dv, n0)
            best = min(
                wcn_denominator(self.metric, max(du - s, fu), max(dv - (k - s), fv), n0)
                for s in range(k + 1)
            )
            if self.metric is LocalMetric.JACCARD:
                best = max(best, 1.0)
            low_den[p] = best
        if np.any(low_den <= 0) or np.any(up_den <= 0):
            raise BudgetError(
                f"budget {k} drives a {self.metric.value} denominator bound to zero; cap the budget"
            )
        upper = np.repeat((self.weights / low_den)[:, None], m, axis=1)
        lower = np.repeat((self.weights / up_den)[:, None], m, axis=1)
        self.wcn_lower_den = low_den
        self.wcn_upper_den = up_den
        return upper, lower

    # ---- states
    def initial_state(self) -> np.ndarray:
        return self.x0.copy()

    def apply(self, x: np.ndarray, edge_index: int) -> np.ndarray:
        y = x.copy()
        for r, j in self.cells[edge_index]:
            y[r, j] = False
        return y

    def state_for(self, deleted: Iterable[Edge]) -> np.ndarray:
        x = self.x0.copy()
        for e in deleted:
            for r, j in self.cells[self.index[edge_key(*e)]]:
                x[r, j] = False
        return x

    def _deleted(self, x: np.ndarray) -> list[int]:
        return [i for i, cells in enumerate(self.cells) if not x[cells[0]]]

    def col_degrees(self, x: np.ndarray) -> np.ndarray:
        """Current degrees of target nodes implied by state ``x``."""
        deg = self.col_deg0.copy()
        for i in self._deleted(x):
            for c in self.edge_cols[i]:
                deg[c] -= 1
        return deg

    def row_degrees(self, x: np.ndarray) -> np.ndarray:
        """Current degrees of row nodes implied by state ``x``."""
        deg = self.row_deg0.copy()
        for i in self._deleted(x):
            for r in self.edge_rows[i]:
                deg[r] -= 1
        return deg

    # ---- objectives
    def _bilinear(self, x: np.ndarray, coef: np.ndarray) -> float:
        xf = x.astype(float)
        prod = xf[:, self.pair_a] * xf[:, self.pair_b]  # rows x pairs
        return float(np.sum(coef.T * prod))

    def upper(self, x: np.ndarray) -> float:
        return self._bilinear(x, self.upper_coef)

    def lower(self, x: np.ndarray) -> float:
        return self._bilinear(x, self.lower_coef)

    def exact(self, x: np.ndarray) -> float:
        xf = x.astype(float)
        prod = xf[:, self.pair_a] * xf[:, self.pair_b]
        if not len(self.weights):
            return 0.0
        if self.metric.is_cnd:
            deg = self.row_degrees(x)
            total = 0.0
            for r in range(len(self.rows)):
                inner = float(prod[r] @ self.weights)
                if inner:
                    total += inner / row_denominator(self.metric, deg[r])
            return total
        n_common = prod.sum(axis=0)
        deg = self.col_degrees(x)
        total = 0.0
        for p in range(len(self.weights)):
            if n_common[p] > 0:
                du, dv = deg[self.pair_a[p]], deg[self.pair_b[p]]
                total += self.weights[p] * n_common[p] / wcn_denominator(
                    self.metric, du, dv, n_common[p]
                )
        return total

    def marginals(self, x: np.ndarray, which: str = "upper") -> np.ndarray:
        """Decrease of the chosen bound from deleting each candidate edge.

        Already-deleted candidates get ``-inf``.
        """
        coef = self.upper_coef if which == "upper" else self.lower_coef
        xf = x.astype(float)
        cell = np.zeros_like(xf)
        for p in range(len(self.weights)):
            a, b = self.pair_a[p], self.pair_b[p]
            cell[:, a] += coef[p] * xf[:, b]
            cell[:, b] += coef[p] * xf[:, a]
        out = np.empty(len(self.candidates))
        for i, cells in enumerate(self.cells):
            r, j = cells[0]
            if not x[r, j]:
                out[i] = -np.inf
            else:
                out[i] = sum(cell[rr, jj] for rr, jj in cells)
        return out


def bound_total_similarity(g: Graph, metric, targets: TargetSet, k: int) -> BoundPair:
    """Lower/upper bounds on the objective at the current graph for budget ``k``."""
    obj = LocalObjective(g, metric, targets, k)
    x = obj.initial_state()
    return BoundPair(lower=obj.lower(x), upper=obj.upper(x))
