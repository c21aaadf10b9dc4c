"""Budget sweeps over attack algorithms, with CSV output.

A sweep loads or generates one network, samples (or reads) a target set and
runs every requested algorithm at every budget. Objectives are reported raw
and normalised by their value on the unattacked graph.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .baselines import greedy_base, random_del
from .errors import ConfigError, GraphError, MetricError
from .global_attack import act_profile, greedy_katz
from .global_metrics import KatzParams
from .graph import Graph, generate_scale_free, read_edge_list_file
from .local_attack import approx_local
from .local_metrics import LOCAL_METRIC_NAMES, TargetSet
from .objectives import METRIC_NAMES, make_objective

ALGORITHMS = ("approx_local", "greedy_katz", "local_act", "greedy_base", "random_del")

# which metrics each algorithm can attack
_SUPPORTS = {
    "approx_local": set(LOCAL_METRIC_NAMES),
    "greedy_katz": {"katz"},
    "local_act": {"act"},
    "greedy_base": set(METRIC_NAMES),
    "random_del": set(METRIC_NAMES),
}


# --- configuration ----------------------------------------------------------------


def parse_budgets(text: str) -> tuple[int, ...]:
    """``"0,5,10"`` or an inclusive range ``"0:50:5"`` (step defaults to 1)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] <= 0):
                raise ValueError
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1
            out = tuple(range(start, stop + 1, step))
        else:
            out = tuple(int(p) for p in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"cannot parse budgets {text!r}") from None
    return out


def parse_target_pairs(text: str) -> TargetSet:
    """``"u v [w]; u v [w]; ..."`` with unit weight when omitted."""
    links = []
    for chunk in text.split(";"):
        tokens = chunk.split()
        if not tokens:
            continue
        try:
            if len(tokens) == 2:
                links.append((int(tokens[0]), int(tokens[1]), 1.0))
            elif len(tokens) == 3:
                links.append((int(tokens[0]), int(tokens[1]), float(tokens[2])))
            else:
                raise ValueError
        except ValueError:
            raise ConfigError(f"bad target pair {chunk.strip()!r}; expected 'u v [weight]'") from None
    if not links:
        raise ConfigError("empty target list")
    try:
        return TargetSet(tuple(links))
    except GraphError as exc:
        raise ConfigError(str(exc)) from None


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines a sweep.

    The network comes from ``network`` (an edge-list path) when set, and
    otherwise from the scale-free generator with ``n``, ``gamma`` and
    ``graph_seed``. ``targets`` overrides target sampling.
    """

    metric: str
    algorithms: tuple[str, ...] = ("approx_local",)
    budgets: tuple[int, ...] = (0,)
    network: str | None = None
    n: int = 1000
    gamma: float = 2.0
    graph_seed: int = 0
    target_size: int = 20
    target_seed: int = 0
    targets: TargetSet | None = None
    seed: int = 0
    random_repeats: int = 1
    output: str | None = None
    workers: int = 1
    timing: bool = True
    plot: bool = False

    def __post_init__(self):
        metric = str(self.metric).strip().lower()
        if metric not in METRIC_NAMES:
            raise ConfigError(f"unknown metric {self.metric!r}; choose from {', '.join(METRIC_NAMES)}")
        object.__setattr__(self, "metric", metric)
        algos = tuple(str(a).strip().lower() for a in self.algorithms)
        if not algos:
            raise ConfigError("no algorithms given")
        for a in algos:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
            if metric not in _SUPPORTS[a]:
                raise ConfigError(
                    f"algorithm {a} does not attack metric {metric}; it supports "
                    f"{', '.join(sorted(_SUPPORTS[a]))}"
                )
        if len(set(algos)) != len(algos):
            raise ConfigError("algorithm listed twice")
        object.__setattr__(self, "algorithms", algos)
        b = tuple(int(x) for x in self.budgets)
        if not b:
            raise ConfigError("no budgets given")
        if any(x < 0 for x in b) or any(y <= x for x, y in zip(b, b[1:])):
            raise ConfigError(f"budgets must be non-negative and strictly increasing, got {list(b)}")
        object.__setattr__(self, "budgets", b)
        if self.targets is None and self.target_size < 1:
            raise ConfigError(f"target_size must be at least 1, got {self.target_size}")
        if self.random_repeats < 1:
            raise ConfigError("random_repeats must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    @classmethod
    def from_mapping(cls, items: dict[str, str], base_dir: Path | None = None) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        kw: dict = {}
        for key, value in items.items():
            key = key.strip().lower().replace("-", "_")
            if key == "algorithm":
                key = "algorithms"
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            value = value.strip()
            if key == "algorithms":
                kw[key] = tuple(a for a in value.replace(",", " ").split())
            elif key == "budgets":
                kw[key] = parse_budgets(value)
            elif key == "targets":
                kw[key] = parse_target_pairs(value)
            elif key in ("n", "graph_seed", "target_size", "target_seed", "seed",
                         "random_repeats", "workers"):
                try:
                    kw[key] = int(value)
                except ValueError:
                    raise ConfigError(f"{key} must be an integer, got {value!r}") from None
            elif key == "gamma":
                try:
                    kw[key] = float(value)
                except ValueError:
                    raise ConfigError(f"gamma must be a number, got {value!r}") from None
            elif key in ("timing", "plot"):
                kw[key] = _bool(value)
            elif key in ("network", "output") and base_dir is not None and value:
                p = Path(value)
                kw[key] = str(p if p.is_absolute() else base_dir / p)
            else:
                kw[key] = value
        if "metric" not in kw:
            raise ConfigError("config needs a 'metric' key")
        return cls(**kw)

    @classmethod
    def from_text(cls, text: str, base_dir: Path | None = None) -> "ExperimentConfig":
        items: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config line {lineno}: expected key = value, got {raw!r}")
            key, value = line.split("=", 1)
            items[key.strip()] = value
        return cls.from_mapping(items, base_dir)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_text(path.read_text(), base_dir=path.parent)


# --- inputs -------------------------------------------------------------------------


def load_network(cfg: ExperimentConfig) -> Graph:
    if cfg.network:
        return read_edge_list_file(cfg.network)
    return generate_scale_free(cfg.n, cfg.gamma, cfg.graph_seed)


def eligible_pairs(g: Graph) -> np.ndarray:
    """Non-adjacent pairs (u < v) with at least one common neighbour, sorted."""
    if g.n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    a = g.adjacency_matrix()
    two_hop = a @ a
    iu, iv = np.triu_indices(g.n, 1)
    mask = (two_hop[iu, iv] > 0) & (a[iu, iv] == 0)
    return np.column_stack([iu[mask], iv[mask]]).astype(np.int64)


def sample_targets(g: Graph, size: int, seed: int) -> TargetSet:
    """Uniform sample of ``size`` eligible pairs with unit weights."""
    if size < 1:
        raise ConfigError(f"target set size must be at least 1, got {size}")
    pool = eligible_pairs(g)
    if len(pool) < size:
        raise GraphError(
            f"only {len(pool)} non-adjacent pairs with a common neighbour; cannot sample {size}"
        )
    pick = np.sort(np.random.default_rng(seed).choice(len(pool), size=size, replace=False))
    return TargetSet(tuple((int(pool[i, 0]), int(pool[i, 1]), 1.0) for i in pick))


def resolve_targets(g: Graph, cfg: ExperimentConfig) -> TargetSet:
    if cfg.targets is not None:
        return cfg.targets.validate(g)
    return sample_targets(g, cfg.target_size, cfg.target_seed)


# --- sweep ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """One (algorithm, budget) result. Bounds are in normalised units."""

    algorithm: str
    metric: str
    budget: int
    raw: float
    normalized: float
    bound_lower: float | None = None
    bound_upper: float | None = None
    wall_time: float | None = None


CSV_COLUMNS = tuple(f.name for f in fields(SweepRow))


@dataclass
class SweepResult:
    rows: list[SweepRow]
    baseline: float
    graph_digest: str
    n: int
    m: int
    targets: TargetSet
    katz_beta: float | None = None
    provenance: dict[str, str] = field(default_factory=dict)


def _run_cell(task):
    """Worker entry point; returns (task, payload, seconds)."""
    algo, budget, g, metric, targets, katz, seed, repeats = task
    start = time.perf_counter()
    if algo == "approx_local":
        r = approx_local(g, metric, targets, budget)
        payload = (r.final_objective, r.info["bound_lower"], r.info["bound_upper"])
    elif algo == "greedy_katz":
        payload = greedy_katz(g, katz, targets, budget).objective_trace
    elif algo == "local_act":
        payload = [(c.t, c.deleted is not None, c.act) for c in act_profile(g, targets, budget)]
    else:
        objective = make_objective(metric, g, targets, katz=katz)
        keep = metric == "act"
        if algo == "greedy_base":
            payload = greedy_base(g, targets, budget, metric=metric,
                                  preserve_connectivity=keep, objective=objective).objective_trace
        else:
            payload = [
                random_del(g, targets, budget, seed + i, metric=metric,
                           preserve_connectivity=keep, objective=objective).objective_trace
                for i in range(repeats)
            ]
    return payload, time.perf_counter() - start


def _tasks(cfg, g, targets, katz):
    top = cfg.budgets[-1]
    out = []
    for algo in cfg.algorithms:
        budgets = cfg.budgets if algo == "approx_local" else (top,)
        for b in budgets:
            out.append((algo, b, g, cfg.metric, targets, katz, cfg.seed, cfg.random_repeats))
    return out


def _at(trace: Sequence[float], k: int) -> float:
    # a trace stops early once no edge is left to delete
    return trace[min(k, len(trace) - 1)]


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Run every (algorithm, budget) cell of ``cfg``.

    Approx-Local runs once per budget because its relaxation depends on the
    budget. The other algorithms produce nested solutions, so each runs once
    at the largest budget and smaller budgets read off its trace; Local-ACT
    takes the best realised budget t <= k from one shared profile.
    """
    g = load_network(cfg)
    targets = resolve_targets(g, cfg)
    katz = KatzParams.for_graph(g) if cfg.metric == "katz" else None
    baseline = make_objective(cfg.metric, g, targets, katz=katz)(g)
    if not baseline > 0:
        raise MetricError(f"{cfg.metric} objective is zero on the unattacked graph; cannot normalise")
    tasks = _tasks(cfg, g, targets, katz)
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]

    rows: list[SweepRow] = []
    for task, (payload, secs) in zip(tasks, results):
        algo, top = task[0], task[1]
        wall = secs if cfg.timing else None
        if algo == "approx_local":
            raw, lo, hi = payload
            rows.append(SweepRow(algo, cfg.metric, top, raw, raw / baseline,
                                 lo / baseline, hi / baseline, wall))
            continue
        for k in cfg.budgets:
            if algo == "local_act":
                profile = payload[: k + 1]
                raw = max((act for _, ok, act in profile if ok), default=math.nan)
            elif algo == "random_del":
                raw = float(np.mean([_at(tr, k) for tr in payload]))
            else:
                raw = _at(payload, k)
            rows.append(SweepRow(algo, cfg.metric, k, raw, raw / baseline, None, None, wall))
    provenance = {
        "seed": str(cfg.seed),
        "metric": cfg.metric,
        "network": g.digest(),
        "nodes": str(g.n),
        "edges": str(g.m),
        "source": cfg.network or f"scale_free n={cfg.n} gamma={cfg.gamma!r} seed={cfg.graph_seed}",
        "targets": ("explicit" if cfg.targets is not None
                    else f"sampled size={cfg.target_size} seed={cfg.target_seed}"),
        "random_repeats": str(cfg.random_repeats),
    }
    if katz is not None:
        provenance["katz_beta"] = repr(katz.beta)
    return SweepResult(rows, baseline, g.digest(), g.n, g.m, targets,
                       katz.beta if katz else None, provenance)


# --- CSV ---------------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: Iterable[SweepRow], stream: IO[str], provenance: dict[str, str] | None = None) -> None:
    for key, value in (provenance or {}).items():
        stream.write(f"# {key}: {value}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])


def read_csv(stream: IO[str]) -> tuple[list[SweepRow], dict[str, str]]:
    provenance: dict[str, str] = {}
    body = []
    for line in stream:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            provenance[key.strip()] = value.strip()
        else:
            body.append(line)
    reader = csv.DictReader(body)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        def num(key):
            return float(rec[key]) if rec[key] != "" else None

        rows.append(
            SweepRow(rec["algorithm"], rec["metric"], int(rec["budget"]), float(rec["raw"]),
                     float(rec["normalized"]), num("bound_lower"), num("bound_upper"),
                     num("wall_time"))
        )
    return rows, provenance


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    write_csv(result.rows, buf, result.provenance)
    return buf.getvalue()


def sweep_digest(result: SweepResult) -> str:
    """Hash of the CSV output with timings blanked."""
    rows = [replace(r, wall_time=None) for r in result.rows]
    buf = io.StringIO()
    write_csv(rows, buf, result.provenance)
    return hashlib.sha256(buf.getvalue().encode()).hexdigest()


def save_sweep(result: SweepResult, path, plot: bool = False) -> list[Path]:
    """Write the CSV (and optionally a PNG figure beside it); return the paths."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(result))
    written = [path]
    if plot:
        from .plotting import plot_sweep

        written.append(plot_sweep(result.rows, path.with_suffix(".png")))
    return written
