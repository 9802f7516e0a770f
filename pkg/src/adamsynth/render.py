"""Deterministic SVG rendering of Adams charts and their synthetic translation.

Dots sit at (stem, filtration).  In the synthetic view a dot is coloured by
its tau-torsion order; in the Adams view a d_r arrow gets the colour of the
torsion it creates, tau^(r-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union
from xml.sax.saxutils import escape

from .chart import Chart, ChartClass
from .synthetic import SyntheticGenerator, translate

DEFAULT_COLORS = {None: "black", 1: "red", 2: "blue", 3: "green", 4: "magenta"}


@dataclass(frozen=True)
class RenderStyle:
    colors: dict = field(default_factory=lambda: dict(DEFAULT_COLORS))
    high_torsion: str = "orange"  # tau^5 and beyond
    unit: int = 40
    dot_radius: float = 4.0
    spacing: float = 9.0  # horizontal offset between classes sharing a bidegree
    margin: int = 40
    grid: bool = True
    labels: bool = True
    label_size: int = 9

    def color(self, torsion: Optional[int]) -> str:
        if torsion in self.colors:
            return self.colors[torsion]
        if torsion is not None and torsion >= 5:
            return self.high_torsion
        raise KeyError(f"no colour for torsion {torsion}")

    def page_color(self, r: int) -> str:
        return self.color(r - 1)


def _f(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _window(chart: Chart, classes: Sequence[ChartClass]):
    if chart.window:
        return chart.window
    if not classes:
        return (0, 1, 0, 1)
    ns = [c.n for c in classes]
    ss = [c.s for c in classes]
    return (min(ns), max(ns), min(ss), max(ss))


def render_svg(
    source: Union[Chart, tuple[Chart, Sequence[SyntheticGenerator]]],
    style: Optional[RenderStyle] = None,
    synthetic: bool = False,
) -> str:
    """SVG text for a chart (Adams view) or, with ``synthetic``, its synthetic translation."""
    style = style or RenderStyle()
    chart = source[0] if isinstance(source, tuple) else source
    if synthetic:
        gens = source[1] if isinstance(source, tuple) else translate(chart)
        torsion = {g.key: g.torsion for g in gens}
        classes = [g.cls for g in gens]
    else:
        torsion = {c.key: None for c in chart.classes}
        classes = list(chart.classes)
    n0, n1, s0, s1 = _window(chart, classes)
    u, m = style.unit, style.margin
    width = (n1 - n0 + 1) * u + 2 * m
    height = (s1 - s0 + 1) * u + 2 * m

    per_cell: dict = {}
    for c in classes:
        per_cell.setdefault((c.n, c.s), []).append(c.index)

    def pos(key) -> tuple[float, float]:
        n, s, i = key
        idx = sorted(per_cell.get((n, s), [i]))
        k = idx.index(i) if i in idx else 0
        off = (k - (len(idx) - 1) / 2) * style.spacing
        x = m + (n - n0 + 0.5) * u + off
        y = height - m - (s - s0 + 0.5) * u
        return x, y

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        '<g id="axes" stroke="black" stroke-width="1">',
        f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}"/>',
        "</g>",
    ]
    ticks = ['<g id="ticks" font-family="sans-serif" font-size="10" text-anchor="middle">']
    for n in range(n0, n1 + 1):
        x = m + (n - n0 + 0.5) * u
        ticks.append(f'<text x="{_f(x)}" y="{height - m + 14}">{n}</text>')
    for s in range(s0, s1 + 1):
        y = height - m - (s - s0 + 0.5) * u
        ticks.append(f'<text x="{m - 12}" y="{_f(y + 3)}">{s}</text>')
    ticks.append("</g>")
    out += ticks
    if style.grid:
        out.append('<g id="grid" stroke="#dddddd" stroke-width="0.5">')
        for n in range(n0, n1 + 2):
            x = m + (n - n0) * u
            out.append(f'<line x1="{x}" y1="{m}" x2="{x}" y2="{height - m}"/>')
        for s in range(s0, s1 + 2):
            y = height - m - (s - s0) * u
            out.append(f'<line x1="{m}" y1="{y}" x2="{width - m}" y2="{y}"/>')
        out.append("</g>")

    present = {c.key for c in classes}
    out.append('<g id="structlines" stroke="black" stroke-width="1">')
    for sl in chart.structlines:
        if sl.source in present and sl.target in present:
            (x1, y1), (x2, y2) = pos(sl.source), pos(sl.target)
            out.append(f'<line class="{sl.multiplier}" x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}"/>')
    out.append("</g>")

    if not synthetic:
        out.append('<g id="differentials" stroke-width="1.2">')
        for d in chart.differentials:
            if d.source not in present or d.target not in present:
                continue
            (x1, y1), (x2, y2) = pos(d.source), pos(d.target)
            col = style.page_color(d.page)
            out.append(
                f'<line class="d{d.page}" stroke="{col}" x1="{_f(x1)}" y1="{_f(y1)}" '
                f'x2="{_f(x2)}" y2="{_f(y2)}" marker-end="url(#arrow-{d.page})"/>')
        out.append("</g>")
        pages = sorted({d.page for d in chart.differentials})
        if pages:
            defs = ["<defs>"]
            for r in pages:
                defs.append(
                    f'<marker id="arrow-{r}" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" '
                    f'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{style.page_color(r)}"/></marker>')
            defs.append("</defs>")
            out[1:1] = defs

    out.append('<g id="classes">')
    for c in sorted(classes, key=lambda c: c.key):
        x, y = pos(c.key)
        col = style.color(torsion[c.key])
        title = escape(c.label)
        out.append(
            f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(style.dot_radius)}" fill="{col}">'
            f"<title>{title}</title></circle>")
        if style.labels and c.name:
            out.append(
                f'<text x="{_f(x + style.dot_radius + 1)}" y="{_f(y - style.dot_radius - 1)}" '
                f'font-family="sans-serif" font-size="{style.label_size}">{escape(c.name.text)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
