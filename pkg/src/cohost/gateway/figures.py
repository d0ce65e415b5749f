"""Matplotlib figures written next to the ndjson logs by ``cohost simulate``."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..intervene import VisualizationSpec  # noqa: E402
from .render import BAR_COLOR, HIGHLIGHT_COLOR, TITLES  # noqa: E402

# no timestamps or software tags, so reruns give identical files
_PNG_META = {"Software": None}


def chart_figure(spec: VisualizationSpec, path: str | Path, dpi: int = 100) -> Path:
    labels = [b.label for b in spec.bars]
    values = [b.seconds for b in spec.bars]
    colors = [HIGHLIGHT_COLOR if b.highlight else BAR_COLOR for b in spec.bars]
    fig, ax = plt.subplots(figsize=(6.4, 0.5 * len(labels) + 1.2))
    ax.barh(range(len(labels)), values, color=colors)
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels)
    ax.set_xlabel("seconds spoken")
    ax.set_title(f"{TITLES[spec.kind]} (t = {spec.as_of_t}s)")
    for i, v in enumerate(values):
        ax.text(v, i, f" {v:.0f}" if float(v).is_integer() else f" {v:.1f}", va="center")
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=dpi, metadata=_PNG_META)
    plt.close(fig)
    return path


def timeline_figure(
    table: dict[str, list[int]],
    path: str | Path,
    host: str | None = None,
    trigger_t: int | None = None,
    dpi: int = 100,
) -> Path:
    """Cumulative speaking seconds per participant over the meeting."""
    fig, ax = plt.subplots(figsize=(7.5, 4.0))
    for pid in sorted(table):
        row = table[pid]
        style = "--" if pid == host else "-"
        ax.plot(range(len(row)), row, style, label=f"{pid} (host)" if pid == host else pid, lw=1.5)
    if trigger_t is not None:
        ax.axvline(trigger_t, color="0.4", lw=1, ls=":")
        ax.annotate("ask", (trigger_t, ax.get_ylim()[1]), ha="left", va="top", fontsize=9, color="0.3")
    ax.set_xlabel("meeting time (s)")
    ax.set_ylabel("cumulative speaking time (s)")
    ax.legend(loc="upper left", frameon=False, fontsize=9)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=dpi, metadata=_PNG_META)
    plt.close(fig)
    return path
