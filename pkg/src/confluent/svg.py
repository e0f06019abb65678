"""SVG export of diagrams with an optional trace overlay.

Nodes are drawn as disks, junctions as squares and Δ-junctions as squares
with a grey circle.  Each trace gets its own colour.
"""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from confluent.diagram import DELTA, ConfluentDiagram
from confluent.strings import TraceSet

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
           "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"]


def _bounds(points) -> tuple[float, float, float, float]:
    xs = [p[0] for p in points] or [0.0]
    ys = [p[1] for p in points] or [0.0]
    return min(xs), min(ys), max(xs), max(ys)


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def render_svg(d: ConfluentDiagram, traces: TraceSet | None = None, size: int = 480,
               labels: bool = True) -> str:
    """Return an SVG document drawing ``d`` (and ``traces`` on top if given)."""
    pts = list(d.nodes.values()) + [j.point for j in d.junctions.values()]
    pts += [p for a in d.arcs.values() for p in a.polyline]
    if traces is not None:
        pts += [p for t in traces.traces.values() for p in t.polyline]
    x0, y0, x1, y1 = _bounds(pts)
    span = max(x1 - x0, y1 - y0, 1e-9)
    margin = 24.0
    scale = (size - 2 * margin) / span

    def tx(p) -> tuple[str, str]:
        # flip y so that counterclockwise in the model stays counterclockwise on screen
        return _fmt(margin + (p[0] - x0) * scale), _fmt(size - margin - (p[1] - y0) * scale)

    def poly(points) -> str:
        return " ".join(",".join(tx(p)) for p in points)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           '<rect width="100%" height="100%" fill="white"/>',
           '<g id="arcs" fill="none" stroke="black" stroke-width="1.5">']
    for aid in sorted(d.arcs):
        out.append(f'<polyline data-arc={quoteattr(aid)} points="{poly(d.arcs[aid].polyline)}"/>')
    out.append("</g>")

    if traces is not None:
        out.append('<g id="traces" fill="none" stroke-width="1" stroke-opacity="0.85">')
        for i, u in enumerate(sorted(traces.traces)):
            colour = PALETTE[i % len(PALETTE)]
            out.append(f'<polyline data-trace={quoteattr(u)} stroke="{colour}" '
                       f'points="{poly(traces.traces[u].polyline)}"/>')
        out.append("</g>")

    half = 4
    out.append('<g id="junctions">')
    for jid in sorted(d.junctions):
        j = d.junctions[jid]
        x, y = (float(v) for v in tx(j.point))
        out.append(f'<rect data-junction={quoteattr(jid)} x="{_fmt(x - half)}" y="{_fmt(y - half)}" '
                   f'width="{2 * half}" height="{2 * half}" fill="white" stroke="black"/>')
        if j.kind == DELTA:
            out.append(f'<circle class="delta" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{half + 3}" '
                       'fill="none" stroke="grey" stroke-width="2"/>')
    out.append("</g>")

    out.append('<g id="nodes">')
    for n in sorted(d.nodes):
        x, y = tx(d.nodes[n])
        out.append(f'<circle data-node={quoteattr(n)} cx="{x}" cy="{y}" r="5" fill="black"/>')
        if labels:
            out.append(f'<text x="{_fmt(float(x) + 7)}" y="{_fmt(float(y) - 7)}" font-size="11" '
                       f'font-family="sans-serif">{escape(n)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
