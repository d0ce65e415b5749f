"""Deterministic SVG and plain-text renderings of chart payloads."""

from __future__ import annotations

from xml.sax.saxutils import escape

from ..intervene import ChartKind, VisualizationSpec

TITLES = {
    ChartKind.PER_MEMBER: "Speaking time per member",
    ChartKind.SELF_VS_AVERAGE: "Your speaking time vs. the average of others",
}

BAR_COLOR = "#8da0cb"
HIGHLIGHT_COLOR = "#e6550d"

# SVG geometry, px
WIDTH = 640
LABEL_W = 150
VALUE_W = 80
BAR_H = 26
GAP = 10
TOP = 44
PLOT_W = WIDTH - LABEL_W - VALUE_W - 20

TEXT_WIDTH = 40


class RenderError(ValueError):
    pass


def format_seconds(seconds: float) -> str:
    if isinstance(seconds, int) or float(seconds).is_integer():
        return f"{int(seconds)}s"
    return f"{seconds:.1f}s"


def _check(spec: VisualizationSpec) -> None:
    if not spec.bars:
        raise RenderError("chart has no bars")


def bar_lengths(spec: VisualizationSpec, full: float) -> list[float]:
    """Bar lengths proportional to seconds, the longest bar spanning ``full``."""
    top = max(b.seconds for b in spec.bars)
    if top <= 0:
        return [0.0] * len(spec.bars)
    return [full * b.seconds / top for b in spec.bars]


def render_svg(spec: VisualizationSpec) -> str:
    _check(spec)
    height = TOP + len(spec.bars) * (BAR_H + GAP) + 20
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="DejaVu Sans, Arial, sans-serif" font-size="13">',
        f'<text x="10" y="24" font-size="16" font-weight="bold">{escape(TITLES[spec.kind])}</text>',
    ]
    for i, (bar, length) in enumerate(zip(spec.bars, bar_lengths(spec, PLOT_W))):
        y = TOP + i * (BAR_H + GAP)
        color = HIGHLIGHT_COLOR if bar.highlight else BAR_COLOR
        mid = y + BAR_H / 2 + 4.5
        weight = ' font-weight="bold"' if bar.highlight else ""
        cls = "bar highlight" if bar.highlight else "bar"
        lines.append(f'<text x="{LABEL_W - 8}" y="{mid:.1f}" text-anchor="end"{weight}>{escape(bar.label)}</text>')
        lines.append(
            f'<rect class="{cls}" x="{LABEL_W}" y="{y}" '
            f'width="{length:.3f}" height="{BAR_H}" fill="{color}" data-seconds="{bar.seconds}"/>'
        )
        lines.append(f'<text x="{LABEL_W + length + 6:.3f}" y="{mid:.1f}">{format_seconds(bar.seconds)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_text(spec: VisualizationSpec) -> str:
    _check(spec)
    label_w = max(len(b.label) for b in spec.bars)
    out = [TITLES[spec.kind], f"(as of {spec.as_of_t}s; * = highlighted)"]
    for bar, length in zip(spec.bars, bar_lengths(spec, TEXT_WIDTH)):
        fill = ("*" if bar.highlight else "#") * round(length)
        out.append(f"{bar.label:<{label_w}} |{fill:<{TEXT_WIDTH}}| {format_seconds(bar.seconds)}")
    return "\n".join(out) + "\n"


def render_chart(spec: VisualizationSpec, fmt: str) -> str:
    if fmt == "svg":
        return render_svg(spec)
    if fmt == "text":
        return render_text(spec)
    raise RenderError(f"unsupported chart format {fmt!r} (use svg or text)")
