"""Katz similarity, effective resistance and average commute time."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedGraphError, GraphError, MetricError
from .graph import Graph, laplacian_pseudoinverse


def spectral_radius(a: np.ndarray, iterations: int = 50) -> float:
    """Power-iteration estimate of the largest adjacency eigenvalue.

    Starts from the all-ones vector; the norm ratio never overshoots the
    true value for a non-negative symmetric matrix.
    """
    n = a.shape[0]
    if n == 0 or not a.any():
        return 0.0
    x = np.ones(n) / np.sqrt(n)
    est = 0.0
    for _ in range(iterations):
        y = a @ x
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        est = norm
        x = y / norm
    return float(est)


def default_beta(g: Graph) -> float:
    lam = spectral_radius(g.adjacency_matrix())
    return 0.05 if lam == 0 else min(0.05, 0.8 / lam)


@dataclass(frozen=True)
class KatzParams:
    beta: float
    series_tolerance: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.beta > 0:
            raise MetricError(f"Katz beta must be positive, got {self.beta}")

    @classmethod
    def for_graph(cls, g: Graph, **kw) -> "KatzParams":
        return cls(default_beta(g), **kw)

    def check(self, a: np.ndarray) -> None:
        lam = float(np.max(np.abs(np.linalg.eigvalsh(a)))) if a.size else 0.0
        if lam > 0 and self.beta * lam >= 1.0 - 1e-12:
            raise MetricError(
                f"beta={self.beta} is not below 1/lambda_max = {1.0 / lam:.6g} "
                f"(spectral radius {lam:.6g}); the Katz series diverges"
            )


def katz_matrix(g: Graph, p: KatzParams) -> np.ndarray:
    """Closed form (I - beta A)^{-1} - I."""
    a = g.adjacency_matrix()
    p.check(a)
    eye = np.eye(g.n)
    return np.linalg.inv(eye - p.beta * a) - eye


def katz_series(g: Graph, p: KatzParams) -> np.ndarray:
    """Truncated sum of beta^l A^l, stopped once a term's max entry drops below tolerance."""
    a = g.adjacency_matrix()
    p.check(a)
    term = p.beta * a
    total = term.copy()
    for _ in range(p.max_terms - 1):
        term = p.beta * (term @ a)
        total += term
        if np.abs(term).max() < p.series_tolerance:
            break
    return total


def katz_total(k: np.ndarray, targets) -> float:
    return float(sum(w * k[u, v] for u, v, w in targets.links))


def _pair(g: Graph, u: int, v: int) -> None:
    if u == v:
        raise GraphError("resistance between a node and itself is zero by definition")
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise GraphError(f"pair ({u}, {v}) out of range for {g.n} nodes")


def resistance_from_pinv(pinv: np.ndarray, u: int, v: int) -> float:
    return float(pinv[u, u] + pinv[v, v] - 2.0 * pinv[u, v])


def effective_resistance(g: Graph, u: int, v: int) -> float:
    _pair(g, u, v)
    return resistance_from_pinv(laplacian_pseudoinverse(g), u, v)


def volume(g: Graph) -> int:
    return 2 * g.m


def act_distance(g: Graph, u: int, v: int) -> float:
    """Average commute time: graph volume times effective resistance."""
    return volume(g) * effective_resistance(g, u, v)


def total_act(g: Graph, targets) -> float:
    """Weighted sum of commute times over the target links."""
    if not g.is_connected():
        raise DisconnectedGraphError("commute time is infinite on a disconnected graph")
    pinv = laplacian_pseudoinverse(g)
    vol = volume(g)
    return float(sum(w * vol * resistance_from_pinv(pinv, u, v) for u, v, w in targets.links))


def er_approx(g: Graph, u: int, v: int) -> float:
    du, dv = g.degree(u), g.degree(v)
    if du == 0 or dv == 0:
        raise GraphError(f"degree-based resistance estimate needs non-isolated endpoints ({u}, {v})")
    return 1.0 / du + 1.0 / dv
