"""Optional matplotlib renderings of reports, written next to the data files.

All figures go through the Agg backend and strip volatile PNG metadata so
a rerun with identical inputs produces identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tuner import TuneResult

# no Software/date text chunks; reruns must be byte-identical
_PNG_METADATA = {"Software": None}


def _new_axes(width: float = 6.4, height: float = 4.2):
    fig, ax = plt.subplots(figsize=(width, height), dpi=120)
    return fig, ax


def _finish(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=_PNG_METADATA)
    plt.close(fig)


def save_tune_heatmap(result: TuneResult, path: str) -> None:
    """F1 over the (threshold, penalty) grid, best point marked."""
    thresholds = sorted({round(r.threshold, 10) for r in result.trace})
    penalties = sorted({round(r.penalty, 10) for r in result.trace})
    grid = np.full((len(penalties), len(thresholds)), np.nan)
    t_index = {t: k for k, t in enumerate(thresholds)}
    p_index = {p: k for k, p in enumerate(penalties)}
    for r in result.trace:
        grid[p_index[round(r.penalty, 10)], t_index[round(r.threshold, 10)]] = r.f1
    fig, ax = _new_axes(7.2, 4.2)
    im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis",
                   vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(thresholds)))
    ax.set_xticklabels([f"{t:g}" for t in thresholds], rotation=90, fontsize=7)
    ax.set_yticks(range(len(penalties)))
    ax.set_yticklabels([f"{p:g}" for p in penalties], fontsize=8)
    ax.set_xlabel("threshold")
    ax.set_ylabel("penalty")
    bt = t_index[round(result.best.threshold, 10)]
    bp = p_index[round(result.best.penalty, 10)]
    ax.plot(bt, bp, marker="o", markersize=10, markerfacecolor="none",
            markeredgecolor="red", markeredgewidth=2)
    ax.set_title(f"F1 over the parameter grid (best {result.f1:.3f})")
    fig.colorbar(im, ax=ax, label="F1")
    _finish(fig, path)


def save_confidence_histogram(confidences: list[float], path: str) -> None:
    """Distribution of mined-pair confidences."""
    fig, ax = _new_axes()
    if confidences:
        ax.hist(confidences, bins=np.linspace(0.0, 1.0, 41),
                color="#1f77b4", edgecolor="white")
    ax.set_xlim(0.0, 1.0)
    ax.set_xlabel("confidence")
    ax.set_ylabel("mined pairs")
    ax.set_title(f"Confidence distribution ({len(confidences)} pairs)")
    _finish(fig, path)


def save_bench_chart(rows: list[dict], path: str) -> None:
    """Wall-clock seconds per engine/worker configuration."""
    labels = [r["label"] for r in rows]
    seconds = [r["seconds"] for r in rows]
    fig, ax = _new_axes(7.0, 0.6 * max(4, len(rows)))
    y = np.arange(len(rows))
    ax.barh(y, seconds, color="#2ca02c")
    ax.set_yticks(y)
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("wall clock (s)")
    ax.set_title("Mining time per configuration")
    for yi, sec in zip(y, seconds):
        ax.annotate(f"{sec:.2f}s", (sec, yi), xytext=(3, 0),
                    textcoords="offset points", va="center", fontsize=8)
    _finish(fig, path)
