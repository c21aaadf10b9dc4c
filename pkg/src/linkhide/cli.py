"""Command-line entry point: generate, attack, sweep and oracle."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .baselines import greedy_base, random_del
from .errors import ConfigError, LinkHideError
from .experiment import (
    ALGORITHMS,
    ExperimentConfig,
    csv_text,
    parse_target_pairs,
    run_sweep,
    sample_targets,
    save_sweep,
)
from .global_attack import greedy_katz, local_act
from .global_metrics import KatzParams
from .graph import fit_power_law_exponent, generate_scale_free, read_edge_list_file, write_edge_list
from .local_attack import (
    approx_local,
    brute_force_local,
    greedy_cnd_group,
    single_link_cnd,
    single_link_wcn,
)
from .local_metrics import LOCAL_METRIC_NAMES, parse_metric
from .objectives import METRIC_NAMES, make_objective

log = logging.getLogger("linkhide")

ATTACKS = ALGORITHMS + ("single_link", "greedy_cnd")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w"), True


def _write(text: str, path) -> None:
    out, close = _open_out(path)
    try:
        out.write(text)
    finally:
        if close:
            out.close()


def _graph(args):
    if args.network:
        return read_edge_list_file(args.network)
    return generate_scale_free(args.n, args.gamma, args.graph_seed)


def _targets(args, g):
    if args.targets:
        return parse_target_pairs(args.targets).validate(g)
    return sample_targets(g, args.target_size, args.target_seed)


def _name(value: str, allowed, what: str) -> str:
    value = value.strip().lower()
    if value not in allowed:
        raise ConfigError(f"unknown {what} {value!r}; choose from {', '.join(allowed)}")
    return value


# --- subcommands ------------------------------------------------------------------------


def cmd_generate(args) -> int:
    g = generate_scale_free(args.n, args.gamma, args.seed, k_min=args.k_min)
    out, close = _open_out(args.out)
    try:
        write_edge_list(g, out)
    finally:
        if close:
            out.close()
    alpha = fit_power_law_exponent(g.degrees(), k_min=args.k_min)
    log.info("generated n=%d m=%d, fitted exponent %.3f", g.n, g.m, alpha)
    return 0


def _run_attack(algo, metric, g, targets, k, seed):
    if algo == "approx_local":
        return approx_local(g, metric, targets, k)
    if algo == "greedy_katz":
        if metric != "katz":
            raise ConfigError("greedy_katz attacks the katz metric only")
        return greedy_katz(g, KatzParams.for_graph(g), targets, k)
    if algo == "local_act":
        if metric != "act":
            raise ConfigError("local_act attacks the act metric only")
        return local_act(g, targets, k)
    if algo in ("greedy_base", "random_del"):
        objective = make_objective(metric, g, targets)
        keep = metric == "act"
        if algo == "greedy_base":
            return greedy_base(g, targets, k, metric=metric, preserve_connectivity=keep,
                               objective=objective)
        return random_del(g, targets, k, seed, metric=metric, preserve_connectivity=keep,
                          objective=objective)
    if algo == "single_link":
        if len(targets) != 1:
            raise ConfigError("single_link needs exactly one target pair")
        link = targets.pairs()[0]
        fn = single_link_cnd if parse_metric(metric).is_cnd else single_link_wcn
        return fn(g, metric, link, k)
    # greedy_cnd: the group is every node touched by the targets
    return greedy_cnd_group(g, metric, targets.nodes, k)


def cmd_attack(args) -> int:
    metric = _name(args.metric, METRIC_NAMES, "metric")
    algo = _name(args.algorithm, ATTACKS, "algorithm")
    if algo in ("approx_local", "single_link", "greedy_cnd") and metric not in LOCAL_METRIC_NAMES:
        raise ConfigError(f"{algo} attacks local metrics only")
    g = _graph(args)
    targets = _targets(args, g)
    result = _run_attack(algo, metric, g, targets, args.k, args.seed)
    payload = result.to_dict()
    payload["targets"] = [list(t) for t in targets.links]
    _write(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_sweep(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.no_timing:
        overrides["timing"] = False
    if overrides:
        cfg = replace(cfg, **overrides)
    out = args.out or cfg.output
    result = run_sweep(cfg)
    plot = args.plot or cfg.plot
    if out and out != "-":
        for p in save_sweep(result, out, plot=plot):
            log.info("wrote %s", p)
    else:
        if plot:
            raise ConfigError("--plot needs an output path for the figure")
        sys.stdout.write(csv_text(result))
    return 0


def cmd_oracle(args) -> int:
    metric = _name(args.metric, LOCAL_METRIC_NAMES, "local metric")
    g = read_edge_list_file(args.network)
    targets = parse_target_pairs(args.targets).validate(g)
    result = brute_force_local(g, metric, targets, args.k, widen=args.widen)
    _write(json.dumps(result.to_dict(), indent=2) + "\n", args.out)
    return 0


# --- parser ------------------------------------------------------------------------------


def _network_args(p) -> None:
    src = p.add_argument_group("network (edge-list file, or the scale-free generator)")
    src.add_argument("--network", help="edge-list file; ids are compacted to 0..N-1")
    src.add_argument("--n", type=int, default=1000)
    src.add_argument("--gamma", type=float, default=2.0)
    src.add_argument("--graph-seed", type=int, default=0)


def _target_args(p) -> None:
    t = p.add_argument_group("targets")
    t.add_argument("--targets", help="explicit pairs 'u v [w]; u v [w]; ...'")
    t.add_argument("--target-size", type=int, default=20)
    t.add_argument("--target-seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkhide", description="Edge-deletion attacks on similarity-based link prediction."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a connected scale-free graph as an edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("attack", help="run one attack and print the result as JSON")
    _network_args(p)
    _target_args(p)
    p.add_argument("--metric", required=True, help=", ".join(METRIC_NAMES))
    p.add_argument("--algorithm", required=True, help=", ".join(ATTACKS))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0, help="random_del seed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="run a budget sweep from a key=value config file")
    p.add_argument("config")
    p.add_argument("--out", help="CSV path (overrides the config's output)")
    p.add_argument("--plot", action="store_true", help="also write a PNG beside the CSV")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-timing", action="store_true", help="leave wall_time empty")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="exact brute-force attack on a small graph")
    p.add_argument("--network", required=True)
    p.add_argument("--metric", required=True, help=", ".join(LOCAL_METRIC_NAMES))
    p.add_argument("--targets", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--widen", action="store_true",
                   help="consider every edge at a target node, not only decision-matrix edges")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except (LinkHideError, OSError, ValueError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
