"""Uniform access to every supported similarity objective by name."""

from __future__ import annotations

from typing import Callable

from .errors import MetricError
from .global_metrics import KatzParams, katz_matrix, katz_total, total_act
from .graph import Graph
from .local_metrics import LOCAL_METRIC_NAMES, TargetSet, parse_metric, total_similarity

GLOBAL_METRIC_NAMES = ("katz", "act")
METRIC_NAMES = LOCAL_METRIC_NAMES + GLOBAL_METRIC_NAMES


def check_metric(name: str) -> str:
    name = str(name).strip().lower()
    if name not in METRIC_NAMES:
        raise MetricError(f"unknown metric {name!r}; choose from {', '.join(METRIC_NAMES)}")
    return name


def is_maximization(metric: str) -> bool:
    """ACT is a distance, so the attacker pushes it up; everything else goes down."""
    return check_metric(metric) == "act"


def make_objective(
    metric: str, g: Graph, targets: TargetSet, katz: KatzParams | None = None
) -> Callable[[Graph], float]:
    """Objective as a function of the (attacked) graph.

    Katz uses parameters fixed on the unattacked graph ``g`` so that scores
    at different budgets are comparable.
    """
    metric = check_metric(metric)
    if metric == "katz":
        params = katz or KatzParams.for_graph(g)
        return lambda h: katz_total(katz_matrix(h, params), targets)
    if metric == "act":
        return lambda h: total_act(h, targets)
    local = parse_metric(metric)
    return lambda h: total_similarity(h, local, targets)
