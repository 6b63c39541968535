# asymmetry/reports/svg.py
from html import escape
from typing import List, Sequence, Tuple

from asymmetry.core.exceptions import ErrorCode, InputError

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


class LineChart:
    """
    Minimal SVG 1.1 line chart: axes, ticks, one polyline per series and a
    legend, on a fixed viewport.

    Each polyline carries id="series-<key>" so tests and scripts can find it.
    """

    def __init__(
        self,
        title: str,
        x_label: str,
        y_label: str,
        x_range: Tuple[float, float] = (0.0, 1.0),
        y_range: Tuple[float, float] = (0.0, 1.0),
        width: int = 640,
        height: int = 420,
    ):
        if x_range[1] <= x_range[0] or y_range[1] <= y_range[0]:
            raise InputError("Chart ranges must be increasing", error_code=ErrorCode.INVALID_PARAMETER)
        self.title = title
        self.x_label = x_label
        self.y_label = y_label
        self.x_range = x_range
        self.y_range = y_range
        self.width = width
        self.height = height
        self.margin = (60, 30, 50, 40)  # left, right, bottom, top
        self.series: List[Tuple[str, str, List[Tuple[float, float]]]] = []

    def add_series(self, key: str, label: str, xs: Sequence[float], ys: Sequence[float]) -> None:
        if len(xs) != len(ys):
            raise InputError(f"Series {key!r}: {len(xs)} x values vs {len(ys)} y values",
                             error_code=ErrorCode.INVALID_PARAMETER)
        self.series.append((key, label, list(zip(xs, ys))))

    def _x(self, value: float) -> float:
        left, right = self.margin[0], self.width - self.margin[1]
        lo, hi = self.x_range
        return left + (value - lo) / (hi - lo) * (right - left)

    def _y(self, value: float) -> float:
        bottom, top = self.height - self.margin[2], self.margin[3]
        lo, hi = self.y_range
        return bottom - (value - lo) / (hi - lo) * (bottom - top)

    def _axes(self) -> List[str]:
        left, right = self.margin[0], self.width - self.margin[1]
        bottom, top = self.height - self.margin[2], self.margin[3]
        parts = [
            '<g id="axes" stroke="#000000" stroke-width="1">',
            f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>',
            f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}"/>',
            "</g>",
            '<g id="ticks" font-family="sans-serif" font-size="11" fill="#000000">',
        ]
        for k in range(6):
            x_value = self.x_range[0] + k * (self.x_range[1] - self.x_range[0]) / 5
            y_value = self.y_range[0] + k * (self.y_range[1] - self.y_range[0]) / 5
            x, y = self._x(x_value), self._y(y_value)
            parts.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 5}" stroke="#000000"/>')
            parts.append(f'<text x="{x:.2f}" y="{bottom + 18}" text-anchor="middle">{x_value:g}</text>')
            parts.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="#000000"/>')
            parts.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{y_value:g}</text>')
        parts.append("</g>")
        parts.append(
            f'<text x="{(left + right) / 2:.2f}" y="{self.height - 12}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{escape(self.x_label)}</text>'
        )
        parts.append(
            f'<text x="16" y="{(top + bottom) / 2:.2f}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="13" transform="rotate(-90 16 {(top + bottom) / 2:.2f})">{escape(self.y_label)}</text>'
        )
        return parts

    def _legend(self) -> List[str]:
        x = self.width - self.margin[1] - 150
        parts = ['<g id="legend" font-family="sans-serif" font-size="12">']
        for position, (key, label, _) in enumerate(self.series):
            y = self.margin[3] + 12 + 18 * position
            color = PALETTE[position % len(PALETTE)]
            parts.append(f'<line x1="{x}" y1="{y}" x2="{x + 24}" y2="{y}" stroke="{color}" stroke-width="2"/>')
            parts.append(f'<text x="{x + 30}" y="{y + 4}">{escape(label)}</text>')
        parts.append("</g>")
        return parts

    def render(self) -> str:
        """Returns the complete SVG document."""
        parts = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
            f'<svg version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" xmlns="http://www.w3.org/2000/svg">',
            f"<title>{escape(self.title)}</title>",
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="#ffffff"/>',
        ]
        parts.extend(self._axes())
        for position, (key, label, points) in enumerate(self.series):
            color = PALETTE[position % len(PALETTE)]
            coordinates = " ".join(f"{self._x(x):.2f},{self._y(y):.2f}" for x, y in points)
            parts.append(
                f'<polyline id="series-{escape(key)}" fill="none" stroke="{color}" '
                f'stroke-width="1.5" points="{coordinates}"/>'
            )
        parts.extend(self._legend())
        parts.append("</svg>")
        return "\n".join(parts) + "\n"
