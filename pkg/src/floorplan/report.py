"""SVG figures of placements and benchmark tables."""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from .model import Placement, SolveReport


def _num(v) -> str:
    return f"{float(v):.6g}"


def render_svg(placement: Placement, scale: float = 10.0, labels: bool = True,
               shade_dead_space: bool = False) -> str:
    """One ``<rect>`` for the region plus one per block.

    SVG y grows downward, so a block at ``(x, y)`` is drawn at
    ``(x, d - y - h)`` to keep the origin in the bottom-left corner.
    """
    s = Fraction(scale)
    width = placement.region_c * s
    height = placement.region_d * s
    pad = max(float(width), float(height)) * 0.02 + 1
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_num(float(width) + 2 * pad)}" height="{_num(float(height) + 2 * pad)}" '
        f'viewBox="{_num(-pad)} {_num(-pad)} {_num(float(width) + 2 * pad)} {_num(float(height) + 2 * pad)}">',
        f'<title>{escape(placement.instance_name)}</title>',
        "<defs>",
        '<pattern id="hatch" patternUnits="userSpaceOnUse" width="6" height="6" '
        'patternTransform="rotate(45)"><path d="M 0 0 L 0 6" stroke="#555" stroke-width="1"/></pattern>',
        "</defs>",
        "<style>"
        ".region{fill:%s;stroke:#000;stroke-width:1}"
        ".block{fill:#9ecae1;stroke:#08306b;stroke-width:0.5}"
        ".block.rotated{fill:#fdae6b}"
        ".hatch{fill:url(#hatch)}"
        "text{font-family:sans-serif;text-anchor:middle;dominant-baseline:central}"
        "</style>" % ("#d9d9d9" if shade_dead_space else "none"),
        f'<rect class="region" x="0" y="0" width="{_num(width)}" height="{_num(height)}"/>',
    ]
    for e in placement.entries:
        x = e.x * s
        y = (placement.region_d - e.y - e.h) * s
        w, h = e.w * s, e.h * s
        cls = "block rotated" if e.rotated else "block"
        out.append(f'<rect class="{cls}" id="{escape(e.id)}" x="{_num(x)}" y="{_num(y)}" '
                   f'width="{_num(w)}" height="{_num(h)}"/>')
        if e.rotated:
            out.append(f'<path class="hatch" d="M {_num(x)} {_num(y)} h {_num(w)} v {_num(h)} '
                       f'h {_num(-w)} z"/>')
        if labels:
            size = max(min(float(w), float(h)) * 0.35, 1.0)
            out.append(f'<text x="{_num(x + w / 2)}" y="{_num(y + h / 2)}" '
                       f'font-size="{_num(size)}">{escape(e.id)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


COLUMNS = ("circuit", "blocks", "area", "dead_space_pct", "wall_time_s", "status")


def _row(r: SolveReport, unit_scale: Fraction) -> list[str]:
    if r.area is None:
        area = dead = "-"
    else:
        area = f"{float(r.area * unit_scale ** 2):.6g}"
        dead = f"{float(r.dead_space_pct):.2f}"
    return [r.instance_name, str(r.block_count), area, dead, f"{r.wall_time:.2f}", r.status.value]


def emit_table(reports: Sequence[SolveReport], fmt: str = "text",
               unit_scale: Fraction | float = 1) -> str:
    """Rows in input order.  ``unit_scale`` converts one length unit (area
    is scaled by its square)."""
    if not reports:
        raise ValueError("no reports to tabulate")
    scale = Fraction(unit_scale) if not isinstance(unit_scale, float) else Fraction(repr(unit_scale))
    rows = [_row(r, scale) for r in reports]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(COLUMNS)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown table format {fmt!r}")
    widths = [max(len(COLUMNS[i]), *(len(r[i]) for r in rows)) for i in range(len(COLUMNS))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(COLUMNS, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"
