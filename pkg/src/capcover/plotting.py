"""Matplotlib figures for benchmark reports.

Figures are drawn on an Agg canvas directly so no pyplot state or display
backend is involved.
"""

from __future__ import annotations

from typing import List, Sequence

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

_COLOURS = {"cap": "#c0392b", "bastar": "#2c7fb8", "bsa": "#7fbf7b"}
_PANELS = (("steps", "steps"), ("path_length", "path length"), ("overlap_ratio", "overlap ratio"))


def _means(rows: Sequence[dict], maps: List[str], algos: List[str], key: str) -> np.ndarray:
    out = np.full((len(algos), len(maps)), np.nan)
    for i, a in enumerate(algos):
        for j, m in enumerate(maps):
            vals = [r[key] for r in rows if r["algo"] == a and r["map"] == m and r.get(key) is not None]
            if vals:
                out[i, j] = float(np.mean(vals))
    return out


def metrics_figure(rows: Sequence[dict]) -> Figure:
    """Grouped bars of mean steps, path length and overlap ratio per map and algorithm."""
    maps = sorted({r["map"] for r in rows})
    algos = sorted({r["algo"] for r in rows}, key=lambda a: (a != "cap", a))
    fig = Figure(figsize=(4.0 * len(_PANELS), 3.4), dpi=100)
    FigureCanvasAgg(fig)
    x = np.arange(len(maps))
    width = 0.8 / max(1, len(algos))
    for k, (key, label) in enumerate(_PANELS):
        ax = fig.add_subplot(1, len(_PANELS), k + 1)
        vals = _means(rows, maps, algos, key)
        for i, a in enumerate(algos):
            ax.bar(x + (i - (len(algos) - 1) / 2) * width, vals[i], width,
                   label=a, color=_COLOURS.get(a, "#999999"))
        ax.set_xticks(x)
        ax.set_xticklabels(maps, rotation=30, ha="right", fontsize=8)
        ax.set_title(label, fontsize=10)
        ax.tick_params(axis="y", labelsize=8)
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
    fig.axes[0].legend(fontsize=8, frameon=False)
    fig.tight_layout()
    return fig


def save(fig: Figure, path) -> None:
    fig.savefig(path, metadata={"Software": None})

