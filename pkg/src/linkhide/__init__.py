"""Edge-deletion attacks that hide target links from similarity-based link prediction."""

from .baselines import closed_triads, greedy_base, random_del
from .errors import (
    BudgetError,
    ConfigError,
    DisconnectedGraphError,
    EdgeListParseError,
    GenerationError,
    GraphError,
    LinkHideError,
    MetricError,
    OracleTooLargeError,
)
from .experiment import ExperimentConfig, SweepRow, run_sweep, sample_targets
from .global_attack import greedy_katz, knapsack_allocate, local_act
from .global_metrics import (
    KatzParams,
    act_distance,
    effective_resistance,
    er_approx,
    katz_matrix,
    katz_series,
    total_act,
)
from .graph import (
    Graph,
    common_neighbors,
    degree,
    generate_scale_free,
    laplacian_pseudoinverse,
    load_edge_list,
    write_edge_list,
)
from .local_attack import (
    AttackResult,
    approx_local,
    brute_force_local,
    greedy_cnd_group,
    single_link_cnd,
    single_link_wcn,
)
from .local_metrics import (
    BoundPair,
    DecisionMatrix,
    LocalMetric,
    TargetSet,
    bound_total_similarity,
    build_decision_matrix,
    classify,
    local_similarity,
    total_similarity,
)

__version__ = "0.1.0"
