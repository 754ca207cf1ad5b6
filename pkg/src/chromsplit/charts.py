"""ASCII and SVG charts of spectral sequence pages.

A chart is a list of glyph marks on an integer grid plus structure lines
between marks. Rendering is a pure function of the chart, so the output is
byte-stable and suitable for golden-file comparison.

Glyphs: an open square for Z2, W or W[[x]]; a dot for Z/2 or F4; a dot in k
circles for Z/2^(k+1); an open circle for F4[[x]]; "?" for unknown cells.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from html import escape
from typing import Iterable, Sequence

from .modules import InvariantFactors

ASCII_CELL = 8
SVG_STEP = 48
SVG_MARGIN = 40
SVG_SPREAD = 10

LINE_KINDS = ("eta", "nu", "two", "exotic", "d")


@dataclass(frozen=True)
class Mark:
    x: int
    y: int
    glyph: str
    label: str = ""


@dataclass(frozen=True)
class Segment:
    """A structure line from mark ``i0`` of cell (x0, y0) to mark ``i1`` of cell (x1, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int
    kind: str
    i0: int = 0
    i1: int = 0

    def __post_init__(self) -> None:
        if self.kind not in LINE_KINDS:
            raise ValueError(f"unknown line kind {self.kind!r}")


@dataclass
class Chart:
    title: str
    xrange: tuple[int, int]
    yrange: tuple[int, int]
    xlabel: str = "stem"
    ylabel: str = "s"
    marks: list[Mark] = field(default_factory=list)
    segments: list[Segment] = field(default_factory=list)

    def cell(self, x: int, y: int) -> list[Mark]:
        return [m for m in self.marks if m.x == x and m.y == y]

    def add_group(self, x: int, y: int, group: InvariantFactors, label: str = "") -> None:
        for g in glyphs_for(group):
            self.marks.append(Mark(x, y, g, label))

    def inside(self, x: int, y: int) -> bool:
        return self.xrange[0] <= x <= self.xrange[1] and self.yrange[0] <= y <= self.yrange[1]


def glyph(exponent: int | None) -> str:
    """ASCII glyph of a cyclic summand: None for free, k for order 2^k."""
    if exponent is None:
        return "[]"
    return "(" * (exponent - 1) + "*" + ")" * (exponent - 1)


def glyphs_for(group: InvariantFactors) -> list[str]:
    return [glyph(None)] * group.free + [glyph(e) for e in group.torsion]


def _clip(chart: Chart) -> tuple[list[Mark], list[Segment]]:
    marks = [m for m in chart.marks if chart.inside(m.x, m.y)]
    segs = [s for s in chart.segments if chart.inside(s.x0, s.y0) and chart.inside(s.x1, s.y1)]
    dropped = len(chart.marks) - len(marks)
    if dropped:
        warnings.warn(f"{chart.title}: {dropped} marks outside the window were clipped", stacklevel=3)
    return marks, segs


# ---------------------------------------------------------------------------
# Rendering


def render_ascii(chart: Chart) -> str:
    marks, segs = _clip(chart)
    (x0, x1), (y0, y1) = chart.xrange, chart.yrange
    lines = [chart.title, ""]
    for y in range(y1, y0 - 1, -1):
        row = [f"{y:>3} |"]
        for x in range(x0, x1 + 1):
            text = "".join(m.glyph for m in marks if m.x == x and m.y == y)
            if len(text) > ASCII_CELL - 1:
                count = sum(1 for m in marks if m.x == x and m.y == y)
                text = f"{count}x"
            row.append(text.center(ASCII_CELL))
        lines.append("".join(row).rstrip())
    lines.append("    +" + "-" * (ASCII_CELL * (x1 - x0 + 1)))
    lines.append("     " + "".join(str(x).center(ASCII_CELL) for x in range(x0, x1 + 1)).rstrip())
    lines.append(f"     {chart.xlabel} (horizontal), {chart.ylabel} (vertical)")
    labelled = sorted({(m.x, m.y, m.label) for m in marks if m.label})
    if labelled:
        lines.append("")
        lines.append("classes:")
        for x, y, label in labelled:
            lines.append(f"  ({x}, {y}) {label}")
    if segs:
        lines.append("")
        lines.append("lines:")
        for s in sorted(segs, key=lambda s: (LINE_KINDS.index(s.kind), s.x0, s.y0, s.x1, s.y1, s.i0, s.i1)):
            lines.append(f"  {s.kind}: ({s.x0}, {s.y0})#{s.i0} -> ({s.x1}, {s.y1})#{s.i1}")
    return "\n".join(lines) + "\n"


def _position(chart: Chart, x: int, y: int, i: int, counts: dict[tuple[int, int], int]) -> tuple[int, int]:
    k = counts.get((x, y), 1)
    px = SVG_MARGIN + (x - chart.xrange[0]) * SVG_STEP + SVG_STEP // 2
    py = SVG_MARGIN + (chart.yrange[1] - y) * SVG_STEP + SVG_STEP // 2
    px += (2 * i - (k - 1)) * SVG_SPREAD // 2
    return px, py


def _svg_glyph(g: str, px: int, py: int) -> list[str]:
    if g == "[]":
        return [f'<rect x="{px - 5}" y="{py - 5}" width="10" height="10" fill="none" stroke="black"/>']
    if g == "o":
        return [f'<circle cx="{px}" cy="{py}" r="4" fill="none" stroke="black"/>']
    if g == "?":
        return [f'<text x="{px}" y="{py + 4}" text-anchor="middle" font-size="12">?</text>']
    rings = g.count("(")
    out = [f'<circle cx="{px}" cy="{py}" r="3" fill="black"/>']
    for k in range(1, rings + 1):
        out.append(f'<circle cx="{px}" cy="{py}" r="{3 + 3 * k}" fill="none" stroke="black"/>')
    return out


def render_svg(chart: Chart) -> str:
    marks, segs = _clip(chart)
    (x0, x1), (y0, y1) = chart.xrange, chart.yrange
    width = 2 * SVG_MARGIN + (x1 - x0 + 1) * SVG_STEP
    height = 2 * SVG_MARGIN + (y1 - y0 + 1) * SVG_STEP
    counts: dict[tuple[int, int], int] = {}
    index: dict[tuple[int, int], int] = {}
    for m in marks:
        counts[m.x, m.y] = counts.get((m.x, m.y), 0) + 1
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">',
        f'<title>{escape(chart.title)}</title>',
        '<g stroke="#dddddd" stroke-width="1">',
    ]
    for x in range(x0, x1 + 2):
        px = SVG_MARGIN + (x - x0) * SVG_STEP
        out.append(f'<line x1="{px}" y1="{SVG_MARGIN}" x2="{px}" y2="{height - SVG_MARGIN}"/>')
    for y in range(y0, y1 + 2):
        py = SVG_MARGIN + (y - y0) * SVG_STEP
        out.append(f'<line x1="{SVG_MARGIN}" y1="{py}" x2="{width - SVG_MARGIN}" y2="{py}"/>')
    out.append("</g>")
    out.append('<g font-family="monospace" font-size="11" text-anchor="middle">')
    for x in range(x0, x1 + 1):
        px = SVG_MARGIN + (x - x0) * SVG_STEP + SVG_STEP // 2
        out.append(f'<text x="{px}" y="{height - SVG_MARGIN + 16}">{x}</text>')
    for y in range(y0, y1 + 1):
        py = SVG_MARGIN + (y1 - y) * SVG_STEP + SVG_STEP // 2 + 4
        out.append(f'<text x="{SVG_MARGIN - 14}" y="{py}">{y}</text>')
    out.append("</g>")
    out.append('<g stroke="black" stroke-width="1.2" fill="none">')
    for s in segs:
        ax, ay = _position(chart, s.x0, s.y0, s.i0, counts)
        bx, by = _position(chart, s.x1, s.y1, s.i1, counts)
        if s.kind == "nu":
            cx, cy = (ax + bx) // 2, min(ay, by) - SVG_STEP // 2
            out.append(f'<path d="M {ax} {ay} Q {cx} {cy} {bx} {by}"/>')
        elif s.kind == "exotic":
            out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke-dasharray="4,3"/>')
        elif s.kind == "d":
            out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="#888888"/>')
        else:
            out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}"/>')
    out.append("</g>")
    out.append("<g>")
    for m in marks:
        i = index.get((m.x, m.y), 0)
        index[m.x, m.y] = i + 1
        px, py = _position(chart, m.x, m.y, i, counts)
        out.extend(_svg_glyph(m.glyph, px, py))
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_chart(chart: Chart, fmt: str = "ascii") -> str:
    if fmt == "ascii":
        return render_ascii(chart)
    if fmt == "svg":
        return render_svg(chart)
    raise ValueError(f"unknown chart format {fmt!r}")


def render_charts(charts: Sequence[Chart], fmt: str = "ascii") -> str:
    if fmt == "svg":
        if len(charts) != 1:
            raise ValueError("SVG output holds one chart; render the panels separately")
        return render_svg(charts[0])
    return "\n".join(render_ascii(c) for c in charts)


# ---------------------------------------------------------------------------
# Chart builders


def adss_chart(page, title: str) -> Chart:
    """An ADSS page on (p, q) axes: one column per p, q upward."""
    chart = Chart(title, (0, 3), (0, page.depth), xlabel="p", ylabel="q")
    for (p, q) in page.nonzero():
        cell = page[p, q]
        chart.add_group(p, q, cell.group, ", ".join(cell.names))
    return chart


def tdss_chart(page, title: str, stems: tuple[int, int] = (-3, 1)) -> Chart:
    chart = Chart(title, stems, (0, 3), xlabel="q - p", ylabel="p")
    for p in range(4):
        for n in range(stems[0], stems[1] + 1):
            q = n + p
            if (p, q) in page.unknown:
                chart.marks.append(Mark(n, p, "?"))
                continue
            cell = page[p, q]
            if cell.is_zero():
                continue
            module = page.series.get((p, q))
            label = ", ".join(cell.names)
            if module is not None:
                chart.marks.append(Mark(n, p, "o" if module.startswith("F4") else "[]", f"{label} ({module})"))
            else:
                chart.add_group(n, p, cell.group, label)
    return chart


def e4_chart(run, title: str, stems: tuple[int, int], smax: int, page: int = 4) -> Chart:
    """E_page of an algebra scenario with eta lines and exotic extensions by 2."""
    ss, alg = run.ss, run.scenario.presentation
    chart = Chart(title, stems, (0, smax))
    where: dict[str, tuple[int, int, int]] = {}
    for n in range(stems[0], stems[1] + 1):
        for s in range(smax + 1):
            if page <= 3:
                for i, m in enumerate(alg.basis(n, s)):
                    chart.marks.append(Mark(n, s, "*", alg.name(m)))
                    target = ss.d3(m)
                    if target and s + 3 <= smax and stems[0] <= n - 1:
                        tb = alg.basis(n - 1, s + 3)
                        j = min(tb.index(x) for x in target)
                        chart.segments.append(Segment(n, s, n - 1, s + 3, "d", i, j))
                continue
            cell = ss.e4(n, s)
            for i, (rep, name) in enumerate(zip(cell.reps, cell.names)):
                chart.marks.append(Mark(n, s, "*", name))
                where[name] = (n, s, i)
    if page >= 4 and "eta" in alg.names:
        eta = alg.monomial("eta")
        for n in range(stems[0], stems[1]):
            for s in range(smax):
                src = ss.e4(n, s)
                tgt = ss.e4(n + 1, s + 1)
                for i, rep in enumerate(src.reps):
                    c = tgt.coords(alg.scale(eta, rep))
                    if any(c):
                        chart.segments.append(Segment(n, s, n + 1, s + 1, "eta", i, c.index(1)))
    if page >= 4 and run.window is not None:
        for n in range(stems[0], stems[1] + 1):
            for x in run.window[n]:
                if x.twice and x.name in where and x.twice in where:
                    a, b = where[x.name], where[x.twice]
                    chart.segments.append(Segment(a[0], a[1], b[0], b[1], "exotic", a[2], b[2]))
    return chart


def integral_chart(cells: dict, title: str, stems: tuple[int, int], smax: int,
                   links: Iterable[tuple[tuple[int, int], tuple[int, int]]] = ()) -> Chart:
    chart = Chart(title, stems, (0, smax))
    for (n, s) in sorted(cells):
        if stems[0] <= n <= stems[1] and s <= smax:
            chart.add_group(n, s, cells[n, s].group, cells[n, s].name)
    for a, b in links:
        chart.segments.append(Segment(a[0], a[1], b[0], b[1], "exotic"))
    return chart


# ---------------------------------------------------------------------------
# The encoded figures


def figure_1() -> list[Chart]:
    from .duality import adss_run

    f2, z2 = adss_run("F2", 8), adss_run("Z2", 8)
    return [adss_chart(f2.e1, "ADSS E1 = E_infinity, F2 coefficients"),
            adss_chart(z2.e1, "ADSS E1, Z2 coefficients"),
            adss_chart(z2.e2, "ADSS E2 = E_infinity, Z2 coefficients")]


def figure_2() -> list[Chart]:
    from .sseq import run_scenario

    run = run_scenario("lk1-v0")
    return [e4_chart(run, "L_K(1) V(0): E2 with d3", (-2, 10), 5, page=3),
            e4_chart(run, "L_K(1) V(0): E4 = E_infinity", (-2, 10), 5)]


def figure_3() -> list[Chart]:
    from .sseq import run_scenario

    run = run_scenario("lk1-sphere")
    integral = run.integral
    stems, smax = (-2, 12), 6
    links = []
    for n in range(stems[0], stems[1] + 1):
        for x in run.window[n]:
            if x.twice:
                tgt = next(k for k, c in integral.e4.items() if c.name == x.twice and k[0] == n)
                links.append(((n, x.filtration), tgt))
    return [integral_chart(integral.e2, "L_K(1) S^0: E2", stems, smax),
            integral_chart(integral.e4, "L_K(1) S^0: E_infinity", stems, smax, links)]


def figure_4() -> list[Chart]:
    from .sseq import run_scenario

    run = run_scenario("lk1lk2-v0-g21")
    return [e4_chart(run, "L_K(1) E^hG21 V(0): E2 with d3", (-3, 5), 6, page=3),
            e4_chart(run, "L_K(1) E^hG21 V(0): E4 = E_infinity", (-3, 5), 6)]


def figure_5() -> list[Chart]:
    from .duality import tdss_e1, tdss_e2

    return [tdss_chart(tdss_e1(), "TDSS E1"), tdss_chart(tdss_e2(), "TDSS E2")]


FIGURES = {"fig1": figure_1, "fig2": figure_2, "fig3": figure_3, "fig4": figure_4, "fig5": figure_5}
