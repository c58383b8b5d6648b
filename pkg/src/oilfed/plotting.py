"""Figures for sweep results, written next to the CSV output."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from oilfed.metrics import SweepRow  # noqa: E402

_STYLE = {
    "hps": dict(color="#1f77b4", marker="o", label="HPS"),
    "mect": dict(color="#d62728", marker="s", label="MECT"),
    "scc": dict(color="#2ca02c", marker="^", label="SCC"),
}


def plot_miss_rate(rows: Sequence[SweepRow], path: str | Path, title: str | None = None) -> Path:
    """Deadline miss rate against submitted applications, one line per heuristic."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for h in sorted({r.heuristic for r in rows}):
        pts = sorted((r.num_apps, r.miss_rate_mean * 100, r.miss_rate_stddev * 100) for r in rows if r.heuristic == h)
        x, y, err = zip(*pts)
        style = _STYLE.get(h, dict(label=h.upper(), marker="x"))
        ax.errorbar(x, y, yerr=err, capsize=3, linewidth=1.4, markersize=5, **style)
    ax.set_xlabel("Number of applications")
    ax.set_ylabel("Deadline miss rate (%)")
    ax.set_ylim(bottom=0)
    ax.grid(True, alpha=0.3, linestyle=":")
    ax.legend(frameon=False)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
