"""SVG 1.1 plots for a ComplexityReport, emitted as plain text (no plotting engine)."""

from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

from src.core.types import CurveKind, PlotKind
from src.core.validators import RenderError
from src.services.report_builder import ComplexityReport, kde_curves

WIDTH = 640
HEIGHT = 400
MARGIN_LEFT = 70
MARGIN_RIGHT = 160
MARGIN_TOP = 40
MARGIN_BOTTOM = 50
TICKS = 5

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")

# Stroke pattern per growth-curve part: observed dotted, interpolated solid, extrapolated dashed
DASHES = {
    CurveKind.OBSERVED: "1,3",
    CurveKind.INTERPOLATED: None,
    CurveKind.EXTRAPOLATED: "6,4",
}


def _num(value: float) -> str:
    text = f"{value:.2f}"
    return "0.00" if text == "-0.00" else text


def _tick_label(value: float) -> str:
    return f"{value:.4g}"


class SvgCanvas:
    """A fixed-size plot area mapping data coordinates onto the page."""

    def __init__(self, title: str, x_range: tuple[float, float], y_range: tuple[float, float]):
        self.title = title
        self.x_min, self.x_max = x_range
        self.y_min, self.y_max = y_range
        if self.x_max <= self.x_min:
            self.x_max = self.x_min + 1.0
        if self.y_max <= self.y_min:
            self.y_max = self.y_min + 1.0
        self.elements: list[str] = []
        self.legend: list[tuple[str, str, Optional[str]]] = []

    @property
    def plot_width(self) -> float:
        return WIDTH - MARGIN_LEFT - MARGIN_RIGHT

    @property
    def plot_height(self) -> float:
        return HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(self, x: float) -> float:
        return MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * self.plot_width

    def sy(self, y: float) -> float:
        return MARGIN_TOP + self.plot_height - (y - self.y_min) / (self.y_max - self.y_min) * self.plot_height

    def axes(self, x_label: str, y_label: str) -> None:
        left, bottom = MARGIN_LEFT, MARGIN_TOP + self.plot_height
        right, top = MARGIN_LEFT + self.plot_width, MARGIN_TOP
        self.elements.append(
            f'<path d="M{_num(left)},{_num(top)} L{_num(left)},{_num(bottom)} L{_num(right)},{_num(bottom)}" '
            'fill="none" stroke="#000000" stroke-width="1"/>'
        )
        for i in range(TICKS + 1):
            xv = self.x_min + (self.x_max - self.x_min) * i / TICKS
            yv = self.y_min + (self.y_max - self.y_min) * i / TICKS
            px, py = self.sx(xv), self.sy(yv)
            self.elements.append(
                f'<line x1="{_num(px)}" y1="{_num(bottom)}" x2="{_num(px)}" y2="{_num(bottom + 5)}" stroke="#000000"/>'
            )
            self.elements.append(
                f'<text x="{_num(px)}" y="{_num(bottom + 18)}" font-size="10" text-anchor="middle">'
                f"{_tick_label(xv)}</text>"
            )
            self.elements.append(
                f'<line x1="{_num(left - 5)}" y1="{_num(py)}" x2="{_num(left)}" y2="{_num(py)}" stroke="#000000"/>'
            )
            self.elements.append(
                f'<text x="{_num(left - 8)}" y="{_num(py + 3)}" font-size="10" text-anchor="end">'
                f"{_tick_label(yv)}</text>"
            )
        self.elements.append(
            f'<text x="{_num(left + self.plot_width / 2)}" y="{_num(HEIGHT - 10)}" font-size="12" '
            f'text-anchor="middle">{escape(x_label)}</text>'
        )
        self.elements.append(
            f'<text x="15" y="{_num(top + self.plot_height / 2)}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 15 {_num(top + self.plot_height / 2)})">{escape(y_label)}</text>'
        )

    def polyline(self, points: Iterable[tuple[float, float]], color: str, dash: Optional[str], label: str) -> None:
        coords = " ".join(f"{_num(self.sx(x))},{_num(self.sy(y))}" for x, y in points)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"{dash_attr}>'
            f"<title>{escape(label)}</title></polyline>"
        )
        self.legend.append((label, color, dash))

    def bar(self, x0: float, x1: float, height: float, color: str, label: str) -> None:
        left, right = self.sx(x0), self.sx(x1)
        top, base = self.sy(height), self.sy(self.y_min)
        self.elements.append(
            f'<rect x="{_num(left)}" y="{_num(top)}" width="{_num(right - left)}" height="{_num(base - top)}" '
            f'fill="{color}"><title>{escape(label)}</title></rect>'
        )

    def x_labels(self, positions: Sequence[tuple[float, str]]) -> None:
        bottom = MARGIN_TOP + self.plot_height
        for x, text in positions:
            self.elements.append(
                f'<text x="{_num(self.sx(x))}" y="{_num(bottom + 18)}" font-size="10" text-anchor="middle">'
                f"{escape(text)}</text>"
            )

    def render(self) -> str:
        legend = []
        x = WIDTH - MARGIN_RIGHT + 15
        for i, (label, color, dash) in enumerate(self.legend):
            y = MARGIN_TOP + 10 + 18 * i
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            legend.append(
                f'<line x1="{_num(x)}" y1="{_num(y)}" x2="{_num(x + 25)}" y2="{_num(y)}" stroke="{color}" '
                f'stroke-width="1.5"{dash_attr}/>'
            )
            legend.append(f'<text x="{_num(x + 30)}" y="{_num(y + 4)}" font-size="10">{escape(label)}</text>')
        body = "\n".join(self.elements + legend)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
            f"<title>{escape(self.title)}</title>\n"
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>\n'
            f'<text x="{_num(WIDTH / 2)}" y="22" font-size="14" text-anchor="middle">{escape(self.title)}</text>\n'
            f"{body}\n</svg>\n"
        )


def render_growth(title: str, observed: Sequence[dict], expected: Sequence[dict]) -> str:
    """V against N; observed points dotted, interpolated solid, extrapolated dashed."""
    if not observed and not expected:
        raise RenderError("growth", f"no growth points to draw for {title!r}")
    parts = [(CurveKind.OBSERVED, list(observed))] if observed else []
    for kind in (CurveKind.INTERPOLATED, CurveKind.EXTRAPOLATED):
        points = [p for p in expected if p["kind"] == str(kind)]
        if points:
            parts.append((kind, points))

    xs = [p["N"] for _, points in parts for p in points]
    ys = [p["V"] for _, points in parts for p in points]
    canvas = SvgCanvas(title, (0.0, max(xs)), (0.0, max(ys)))
    canvas.axes("N (tokens)", "V (types)")
    for kind, points in parts:
        canvas.polyline(
            [(p["N"], p["V"]) for p in points],
            PALETTE[0] if kind is CurveKind.OBSERVED else PALETTE[1],
            DASHES[kind],
            f"{kind} V",
        )
    return canvas.render()


def _growth(report: ComplexityReport, corpus: Optional[str]) -> str:
    target = report.corpus(corpus) if corpus else report.corpora[0]
    growth = target.value("growth")
    if not growth.get("observed"):
        raise RenderError(f"{target.label}.growth.observed")
    if not growth.get("expected"):
        raise RenderError(f"{target.label}.growth.expected")
    return render_growth(f"Vocabulary growth: {target.label}", growth["observed"], growth["expected"])


def _kde(report: ComplexityReport, measure: str) -> str:
    curves = kde_curves(report, measure)
    xs = [x for c in curves.values() for x in c.x]
    ys = [y for c in curves.values() for y in c.density]
    canvas = SvgCanvas(f"{measure.upper()} sample density", (min(xs), max(xs)), (0.0, max(ys)))
    canvas.axes(measure, "density")
    for i, (label, curve) in enumerate(curves.items()):
        canvas.polyline(curve.points(), PALETTE[i % len(PALETTE)], None, f"corpus {label}")
    return canvas.render()


def _dlevel(report: ComplexityReport) -> str:
    histograms = []
    for corpus in report.corpora:
        counts = corpus.value("dlevel")["counts"]
        total = sum(counts.values()) or 1
        histograms.append((corpus.label, [counts[str(level)] / total for level in range(len(counts))]))
    levels = len(histograms[0][1])
    top = max(max(shares) for _, shares in histograms)
    canvas = SvgCanvas("D-level distribution", (-0.5, levels - 0.5), (0.0, top))
    canvas.axes("", "share of sentences")
    width = 0.8 / len(histograms)
    for i, (label, shares) in enumerate(histograms):
        color = PALETTE[i % len(PALETTE)]
        for level, share in enumerate(shares):
            x0 = level - 0.4 + i * width
            canvas.bar(x0, x0 + width, share, color, f"corpus {label}, level {level}: {share:.3f}")
        canvas.legend.append((f"corpus {label}", color, None))
    canvas.x_labels([(level, str(level)) for level in range(levels)])
    return canvas.render()


def render_svg(report: ComplexityReport, plot_kind: PlotKind | str, corpus: Optional[str] = None) -> str:
    """
    Render one plot of the report.

    ``corpus`` selects the corpus for per-corpus plots (growth); overlay
    plots draw every corpus. Output is byte-identical for identical reports.
    """
    kind = PlotKind(plot_kind)
    if kind is PlotKind.GROWTH:
        return _growth(report, corpus)
    if kind is PlotKind.TTR_KDE:
        return _kde(report, "ttr")
    if kind is PlotKind.FLESCH_KDE:
        return _kde(report, "flesch")
    return _dlevel(report)


def plot_filename(kind: PlotKind, corpus: Optional[str] = None) -> str:
    suffix = f"_{corpus}" if corpus else ""
    return f"{kind}{suffix}.svg"

