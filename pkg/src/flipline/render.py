"""Figure-style output: ASCII grids and SVG snapshot strips.

Rendering is a pure function of its inputs; identical inputs produce
byte-identical output, so renders are golden-file testable.  The SVG
y axis is flipped at render time (screen coordinates grow downward) so
heights read the same way as on paper.
"""

from __future__ import annotations

import xml.sax.saxutils
from dataclasses import dataclass, field

from .core import Configuration, sites_of

GRID_COLOR = "#888888"
IDEAL_COLOR = "#cc0000"
THREAD_COLOR = "#000000"


@dataclass(frozen=True)
class RenderSpec:
    """Pixel geometry and content toggles for SVG panels."""

    cell: int = 16
    show_grid: bool = True
    show_ideal_line: bool = True
    snapshot_steps: tuple[int, ...] = ()
    pad: int = 8
    panel_gap: int = 12

    def __post_init__(self) -> None:
        if self.cell < 1:
            raise ValueError("cell size must be >= 1")


def ascii_grid(config: Configuration) -> str:
    """A (B+1)-line picture of the path, origin bottom-left: 'o' marks
    visited sites, '@' the two endpoints, '.' everything else."""
    params = config.params
    if params.tot > 200:
        raise ValueError("ascii grid limited to tot <= 200")
    A, B = params.A, params.B
    visited = set(sites_of(config))
    rows = []
    for y in range(B, -1, -1):
        row = []
        for x in range(A + 1):
            if (x, y) == (0, 0) or (x, y) == (A, B):
                row.append("@")
            elif (x, y) in visited:
                row.append("o")
            else:
                row.append(".")
        rows.append("".join(row))
    return "\n".join(rows)


def _panel(word: str, ta: int, tb: int, n: int, spec: RenderSpec, ox: int, label: str) -> list[str]:
    A, B = n * ta, n * tb
    cell, pad = spec.cell, spec.pad

    def X(x: int) -> int:
        return ox + pad + x * cell

    def Y(y: int) -> int:
        return pad + (B - y) * cell

    out = [f'<g id="{xml.sax.saxutils.escape(label)}">']
    if spec.show_grid:
        for x in range(A + 1):
            out.append(
                f'<line x1="{X(x)}" y1="{Y(B)}" x2="{X(x)}" y2="{Y(0)}" '
                f'stroke="{GRID_COLOR}" stroke-width="1" stroke-dasharray="2,3"/>'
            )
        for y in range(B + 1):
            out.append(
                f'<line x1="{X(0)}" y1="{Y(y)}" x2="{X(A)}" y2="{Y(y)}" '
                f'stroke="{GRID_COLOR}" stroke-width="1" stroke-dasharray="2,3"/>'
            )
    if spec.show_ideal_line:
        out.append(
            f'<line x1="{X(0)}" y1="{Y(0)}" x2="{X(A)}" y2="{Y(B)}" '
            f'stroke="{IDEAL_COLOR}" stroke-width="1" stroke-dasharray="1,4"/>'
        )
    x = y = 0
    points = [f"{X(0)},{Y(0)}"]
    for ch in word:
        if ch == "a":
            x += 1
        else:
            y += 1
        points.append(f"{X(x)},{Y(y)}")
    out.append(
        f'<polyline points="{" ".join(points)}" fill="none" '
        f'stroke="{THREAD_COLOR}" stroke-width="2"/>'
    )
    out.append("</g>")
    return out


def svg_snapshots(trace, spec: RenderSpec) -> str:
    """One panel per requested snapshot step, laid out left to right.

    `trace` needs a header with ta/tb/n and snapshots as (step, word)
    pairs (a dynamics.Trace works as is).  A requested step without a
    recorded snapshot is an error.
    """
    header = trace.header
    ta, tb, n = header["ta"], header["tb"], header["n"]
    snaps = dict(trace.snapshots)
    steps = spec.snapshot_steps or tuple(sorted(snaps))
    if not steps:
        raise ValueError("trace holds no snapshots to render")
    missing = [s for s in steps if s not in snaps]
    if missing:
        raise ValueError(f"trace has no snapshot at steps {missing}")
    A, B = n * ta, n * tb
    panel_w = A * spec.cell + 2 * spec.pad
    panel_h = B * spec.cell + 2 * spec.pad
    width = len(steps) * panel_w + (len(steps) - 1) * spec.panel_gap
    body = []
    for k, step in enumerate(steps):
        body.extend(
            _panel(snaps[step], ta, tb, n, spec, k * (panel_w + spec.panel_gap), f"step-{step}")
        )
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{panel_h}" viewBox="0 0 {width} {panel_h}">',
        *body,
        "</svg>",
    ]
    return "\n".join(lines) + "\n"


def render_svg_word(config: Configuration, spec: RenderSpec | None = None) -> str:
    """Single-panel SVG of one configuration."""
    spec = spec or RenderSpec()

    class _Shim:
        header = {
            "ta": config.params.ta,
            "tb": config.params.tb,
            "n": config.params.n,
        }
        snapshots = [(0, config.word)]

    shim_spec = RenderSpec(
        cell=spec.cell,
        show_grid=spec.show_grid,
        show_ideal_line=spec.show_ideal_line,
        snapshot_steps=(0,),
        pad=spec.pad,
        panel_gap=spec.panel_gap,
    )
    return svg_snapshots(_Shim(), shim_spec)
