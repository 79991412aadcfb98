"""PNG figures for CLI reports (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed metadata keeps repeated runs byte-identical
_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="png", dpi=100, metadata=_META)
    plt.close(fig)
    return path


def betti_bars(betti, title: str, path, start: int = 0) -> Path:
    """Bar chart of betti numbers against degree."""
    fig, ax = plt.subplots(figsize=(4.5, 3))
    degrees = list(range(start, start + len(betti)))
    ax.bar(degrees, list(betti), color="#4c72b0")
    ax.set_xticks(degrees)
    ax.set_xlabel("degree")
    ax.set_ylabel("dimension")
    ax.set_title(title)
    top = max(list(betti) + [1])
    ax.set_ylim(0, top + 0.5)
    ax.yaxis.get_major_locator().set_params(integer=True)
    fig.tight_layout()
    return _save(fig, Path(path))


def hodge_heatmap(report, path) -> Path:
    """Summand betti numbers: rows are degrees n, columns the summand index i."""
    ns = sorted(report.betti)
    width = max(ns) + 1
    grid = [[report.betti[n][i] if i < len(report.betti[n]) else 0 for i in range(width)] for n in ns]
    fig, ax = plt.subplots(figsize=(1.2 + 0.8 * width, 1.0 + 0.6 * len(ns)))
    top = max(max(row) for row in grid) or 1
    ax.imshow(grid, cmap="Blues", vmin=0, vmax=top, aspect="auto")
    for r, row in enumerate(grid):
        for c, v in enumerate(row):
            ax.text(c, r, str(v), ha="center", va="center", fontsize=9, color="white" if 2 * v > top else "black")
    ax.set_xticks(range(width))
    ax.set_yticks(range(len(ns)))
    ax.set_yticklabels([str(n) for n in ns])
    ax.set_xlabel("summand i")
    ax.set_ylabel("degree n")
    ax.set_title(f"{report.label} Hodge summands")
    fig.tight_layout()
    return _save(fig, Path(path))
