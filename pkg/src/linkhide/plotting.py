"""Figures for sweep results."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiment import SweepRow  # noqa: E402

_LABELS = {
    "approx_local": "Approx-Local",
    "greedy_katz": "Greedy-Katz",
    "local_act": "Local-ACT",
    "greedy_base": "GreedyBase",
    "random_del": "RandomDel",
}


def plot_sweep(rows: Sequence[SweepRow], path, title: str | None = None) -> Path:
    """Normalised objective against budget, one line per algorithm.

    Approx-Local rows with bounds get a shaded envelope between the lower
    and upper bound values.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(4.5, 3.2), dpi=150)
    by_algo: dict[str, list[SweepRow]] = {}
    for r in rows:
        by_algo.setdefault(r.algorithm, []).append(r)
    metric = rows[0].metric if rows else ""
    for algo, group in by_algo.items():
        group = sorted(group, key=lambda r: r.budget)
        ks = [r.budget for r in group]
        line, = ax.plot(ks, [r.normalized for r in group], marker="o", ms=3,
                        label=_LABELS.get(algo, algo))
        if all(r.bound_lower is not None and r.bound_upper is not None for r in group):
            ax.fill_between(ks, [r.bound_lower for r in group], [r.bound_upper for r in group],
                            color=line.get_color(), alpha=0.2, lw=0)
    ax.set_xlabel("budget k (edges deleted)")
    ax.set_ylabel(f"normalised {metric}")
    ax.set_title(title or metric)
    ax.grid(alpha=0.3, lw=0.5)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path
