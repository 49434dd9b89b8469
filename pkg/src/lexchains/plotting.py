"""Figures written next to the text reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _finish(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_fold_scores(scores, path, title=None):
    """Bar chart of per-fold F1-micro with the mean as a dashed line."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    folds = range(1, len(scores) + 1)
    ax.bar(folds, scores, color="#4c72b0")
    mean = sum(scores) / len(scores)
    ax.axhline(mean, color="k", ls="--", lw=1, label=f"mean {mean:.3f}")
    ax.set_xlabel("fold")
    ax.set_ylabel("F1-micro")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(list(folds))
    ax.legend(loc="lower right", frameon=False)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_chunk_study(rows, path, title=None):
    """F1-micro and compression ratio against fixed-chain chunk size."""
    sizes = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(sizes, [r[1] for r in rows], "o-", color="#4c72b0", label="F1-micro")
    ax.set_xlabel("chunk size")
    ax.set_ylabel("F1-micro")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(sizes)
    ax2 = ax.twinx()
    ax2.plot(sizes, [r[2] for r in rows], "s--", color="#dd8452", label="tokens kept")
    ax2.set_ylabel("output / input tokens")
    ax2.set_ylim(0, 1.05)
    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], loc="lower left", frameon=False)
    if title:
        ax.set_title(title)
    return _finish(fig, path)
