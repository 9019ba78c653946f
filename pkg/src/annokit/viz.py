"""Deterministic visual exports of the annotator graph.

All images are hand-assembled SVG strings so identical inputs yield
byte-identical outputs. Agreement values share one fixed diverging color
scale over [-1, 1] (blue = disagreement, red = agreement) so images from
different runs are comparable.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from typing import Optional, Sequence

from .agreement import AnnotatorGraph
from .errors import UnknownAnnotatorError

_LOW = (0x21, 0x66, 0xAC)  # -1
_MID = (0xF7, 0xF7, 0xF7)  # 0
_HIGH = (0xB2, 0x18, 0x2B)  # +1
BLANK_FILL = "#e8e8e8"


def scale_color(value: float) -> str:
    """Map an agreement in [-1, 1] to the fixed diverging scale."""
    v = max(-1.0, min(1.0, float(value)))
    if v < 0:
        a, b, t = _LOW, _MID, v + 1.0
    else:
        a, b, t = _MID, _HIGH, v
    rgb = tuple(round(a[k] + (b[k] - a[k]) * t) for k in range(3))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ring_positions(n: int, cx: float, cy: float, radius: float) -> list:
    out = []
    for i in range(n):
        angle = -math.pi / 2 + 2 * math.pi * i / max(n, 1)
        out.append((cx + radius * math.cos(angle), cy + radius * math.sin(angle)))
    return out


def export_graph_2d(graph: AnnotatorGraph) -> str:
    """Agreement graph as SVG: nodes on a ring, edges colored by agreement."""
    names = graph.annotators
    n = len(names)
    size = 560.0
    positions = dict(zip(names, _ring_positions(n, size / 2, size / 2, 190.0)))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" '
        f'height="{size:.0f}" viewBox="0 0 {size:.0f} {size:.0f}" '
        'font-family="sans-serif" font-size="12">',
        f'<rect width="{size:.0f}" height="{size:.0f}" fill="white"/>',
    ]
    for (a, b), data in sorted(graph.edges.items()):
        xa, ya = positions[a]
        xb, yb = positions[b]
        color = scale_color(data["agreement"])
        parts.append(
            f'<line x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xb)}" y2="{_fmt(yb)}" '
            f'stroke="{color}" stroke-width="3"/>'
        )
        mx, my = (xa + xb) / 2, (ya + yb) / 2
        parts.append(
            f'<text x="{_fmt(mx)}" y="{_fmt(my - 4)}" text-anchor="middle" '
            f'fill="#333333">{_fmt(data["agreement"])} (n={data["overlap"]})</text>'
        )
    for name in names:
        x, y = positions[name]
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="30" fill="#fdfdfd" '
            'stroke="#444444" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y - 2)}" text-anchor="middle" '
            f'font-weight="bold">{name}</text>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y + 12)}" text-anchor="middle" '
            f'fill="#555555">{_fmt(graph.reliability(name))}</text>'
        )
        intra = graph.intra(name)
        if intra is not None:
            parts.append(
                f'<text x="{_fmt(x)}" y="{_fmt(y + 44)}" text-anchor="middle" '
                f'fill="#777777">intra {_fmt(intra)}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _sorted_by_reliability(graph: AnnotatorGraph, names: Sequence[str]) -> list:
    order = {name: i for i, name in enumerate(graph.annotators)}
    for name in names:
        if name not in order:
            raise UnknownAnnotatorError(f"unknown annotator {name!r}")
    return sorted(names, key=lambda a: (-graph.reliability(a), order[a]))


def heatmap_matrix(
    graph: AnnotatorGraph,
    annotators: Optional[Sequence[str]] = None,
    others: Optional[Sequence[str]] = None,
) -> dict:
    """Pairwise agreement matrix, rows/cols sorted by descending reliability.

    Diagonal cells hold intra-annotator agreement; cells without an edge
    (insufficient overlap) are null.
    """
    rows = _sorted_by_reliability(graph, annotators or graph.annotators)
    cols = _sorted_by_reliability(graph, others or graph.annotators)
    values = []
    for a in rows:
        line = []
        for b in cols:
            if a == b:
                line.append(graph.intra(a))
            else:
                edge = graph.edge(a, b)
                line.append(None if edge is None else edge["agreement"])
        values.append(line)
    return {"rows": rows, "cols": cols, "values": values}


def export_heatmap(
    graph: AnnotatorGraph,
    annotators: Optional[Sequence[str]] = None,
    others: Optional[Sequence[str]] = None,
) -> str:
    """Heatmap SVG of the pairwise agreement matrix."""
    matrix = heatmap_matrix(graph, annotators, others)
    rows, cols, values = matrix["rows"], matrix["cols"], matrix["values"]
    cell = 56.0
    left, top = 110.0, 70.0
    width = left + cell * len(cols) + 20
    height = top + cell * len(rows) + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}" '
        'font-family="sans-serif" font-size="12">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
    ]
    for j, name in enumerate(cols):
        x = left + cell * j + cell / 2
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(top - 10)}" text-anchor="middle">{name}</text>'
        )
    for i, name in enumerate(rows):
        y = top + cell * i + cell / 2
        parts.append(
            f'<text x="{_fmt(left - 10)}" y="{_fmt(y + 4)}" text-anchor="end">{name}</text>'
        )
        for j in range(len(cols)):
            x = left + cell * j
            yy = top + cell * i
            value = values[i][j]
            fill = BLANK_FILL if value is None else scale_color(value)
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(yy)}" width="{_fmt(cell)}" '
                f'height="{_fmt(cell)}" fill="{fill}" stroke="white"/>'
            )
            if value is not None:
                parts.append(
                    f'<text x="{_fmt(x + cell / 2)}" y="{_fmt(yy + cell / 2 + 4)}" '
                    f'text-anchor="middle">{_fmt(value)}</text>'
                )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def export_graph_3d(graph: AnnotatorGraph) -> dict:
    """Versioned 3D scene: nodes on a unit ring, height from reliability."""
    names = graph.annotators
    n = len(names)
    nodes = []
    for i, name in enumerate(names):
        angle = -math.pi / 2 + 2 * math.pi * i / max(n, 1)
        nodes.append(
            {
                "id": name,
                "x": round(math.cos(angle), 6),
                "y": round(math.sin(angle), 6),
                "z": round(graph.reliability(name) - 1.0, 6),
                "reliability": graph.reliability(name),
                "intra": graph.intra(name),
            }
        )
    edges = [
        {"a": a, "b": b, "agreement": d["agreement"], "overlap": d["overlap"]}
        for (a, b), d in sorted(graph.edges.items())
    ]
    return {"version": 1, "layout": "ring", "nodes": nodes, "edges": edges}


def scene_schema() -> dict:
    """The JSON schema shipped for the 3D scene format."""
    text = resources.files("annokit").joinpath("schemas/scene3d.schema.json").read_text()
    return json.loads(text)
