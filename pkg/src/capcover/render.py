"""Deterministic SVG rendering of a coverage trace over its map.

Output is plain text assembled by hand, so the same map and trace always
produce the same bytes.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import CapError
from .grid import Cell
from .sim import visits_from_events

CELL_PX = 20

_FREE = "#ffffff"
_OBSTACLE = "#3b3b3b"
_COVERED = "#b7d7f0"
_PATH = "#c0392b"
_GRID = "#d0d0d0"


class RenderError(CapError, ValueError):
    pass


def _centre(c: Cell, px: int) -> str:
    return f"{c[1] * px + px // 2},{c[0] * px + px // 2}"


def render_svg(truth: np.ndarray, visits: Sequence[Cell], cell_px: int = CELL_PX,
               title: Optional[str] = None) -> str:
    """SVG document with obstacles, covered cells, the path and start/end markers."""
    truth = np.asarray(truth, dtype=bool)
    if truth.ndim != 2 or truth.size == 0:
        raise RenderError("map must be a non-empty 2-D grid")
    if cell_px < 2:
        raise RenderError("cell_px must be at least 2")
    rows, cols = truth.shape
    cells: List[Cell] = []
    for v in visits:
        r, c = int(v[0]), int(v[1])
        if not (0 <= r < rows and 0 <= c < cols):
            raise RenderError(f"trace cell {(r, c)} lies outside the {rows}x{cols} map")
        if truth[r, c]:
            raise RenderError(f"trace cell {(r, c)} is an obstacle")
        cells.append((r, c))

    w, h = cols * cell_px, rows * cell_px
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    out.append(f'<rect x="0" y="0" width="{w}" height="{h}" fill="{_FREE}"/>')

    out.append(f'<g id="covered" fill="{_COVERED}">')
    for r, c in sorted(set(cells)):
        out.append(f'<rect x="{c * cell_px}" y="{r * cell_px}" width="{cell_px}" height="{cell_px}"/>')
    out.append("</g>")

    out.append(f'<g id="obstacles" fill="{_OBSTACLE}">')
    for r, c in np.argwhere(truth):
        out.append(f'<rect x="{c * cell_px}" y="{r * cell_px}" width="{cell_px}" height="{cell_px}"/>')
    out.append("</g>")

    out.append(f'<g id="grid" stroke="{_GRID}" stroke-width="1">')
    for r in range(rows + 1):
        out.append(f'<line x1="0" y1="{r * cell_px}" x2="{w}" y2="{r * cell_px}"/>')
    for c in range(cols + 1):
        out.append(f'<line x1="{c * cell_px}" y1="0" x2="{c * cell_px}" y2="{h}"/>')
    out.append("</g>")

    if cells:
        pts = " ".join(_centre(c, cell_px) for c in cells)
        out.append(f'<polyline id="path" points="{pts}" fill="none" stroke="{_PATH}" '
                   f'stroke-width="{max(1, cell_px // 8)}" stroke-linejoin="round"/>')
        rad = max(1, cell_px // 4)
        sx, sy = _centre(cells[0], cell_px).split(",")
        ex, ey = _centre(cells[-1], cell_px).split(",")
        out.append(f'<circle id="start" cx="{sx}" cy="{sy}" r="{rad}" fill="#27ae60"/>')
        out.append(f'<rect id="end" x="{int(ex) - rad}" y="{int(ey) - rad}" width="{2 * rad}" '
                   f'height="{2 * rad}" fill="#8e44ad"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def path_points(svg: str) -> List[Cell]:
    """Pixel points of the path polyline in a document made by :func:`render_svg`."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(svg)
    for el in root.iter():
        if el.tag.endswith("polyline") and el.get("id") == "path":
            return [tuple(int(v) for v in p.split(",")) for p in el.get("points").split()]
    return []


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_trace(truth: np.ndarray, events: Iterable[dict], **kw) -> str:
    return render_svg(truth, visits_from_events(list(events)), **kw)
