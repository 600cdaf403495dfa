"""
SVG-графики сводок на matplotlib (холст Agg): одна линия на алгоритм,
легенда и заголовок. Оси линейные или логарифмические.
"""

import io
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import matplotlib
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from matplotlib.lines import Line2D

from sparseica.errors import PlotError
from sparseica.sweep import SummaryRow

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

# текст в SVG остаётся текстом, а не контурами глифов
SVG_RC = {"svg.fonttype": "none", "svg.hashsalt": "sparseica"}


@dataclass(frozen=True)
class PlotSpec:
    title: str = ""
    x_label: str = "sweep value"
    y_label: str = "metric"
    log_x: bool = False
    log_y: bool = False
    statistic: str = "median"
    width: float = 6.4
    height: float = 4.2
    dpi: int = 100


@dataclass
class RenderedPlot:
    """Готовая фигура: линии по алгоритмам и число отброшенных точек"""

    figure: Figure
    lines: Dict[str, Line2D]
    dropped: int

    @property
    def axes(self):
        return self.figure.axes[0]

    def to_pixel(self, x: float, y: float) -> Tuple[float, float]:
        px, py = self.axes.transData.transform((x, y))
        return float(px), float(py)

    def to_data(self, px: float, py: float) -> Tuple[float, float]:
        x, y = self.axes.transData.inverted().transform((px, py))
        return float(x), float(y)

    def pixel_points(self, algorithm: str) -> np.ndarray:
        return self.axes.transData.transform(self.lines[algorithm].get_xydata())

    def _save(self, target):
        with matplotlib.rc_context(SVG_RC):
            self.figure.savefig(target, format="svg", metadata={"Date": None})

    def to_svg(self) -> str:
        buffer = io.StringIO()
        self._save(buffer)
        return buffer.getvalue()

    def write(self, path: str):
        self._save(path)


def _series(rows: Iterable[SummaryRow], spec: PlotSpec) -> Tuple[Dict[str, List[Tuple[float, float]]], int]:
    series: Dict[str, List[Tuple[float, float]]] = {}
    dropped = 0
    for row in rows:
        x, y = row.sweep_value, getattr(row, spec.statistic)
        if not (math.isfinite(x) and math.isfinite(y)):
            dropped += 1
            continue
        if (spec.log_x and x <= 0) or (spec.log_y and y <= 0):
            dropped += 1
            continue
        series.setdefault(row.algorithm, []).append((x, y))
    for points in series.values():
        points.sort()
    return series, dropped


def render_plot(rows: Iterable[SummaryRow], spec: PlotSpec = PlotSpec()) -> RenderedPlot:
    """
    Построить фигуру по строкам сводки.

    Raises:
        PlotError: нет ни одной точки (в том числе после отбрасывания
            неположительных значений на лог-осях)
    """
    if spec.statistic not in ("mean", "median"):
        raise PlotError(f"statistic must be 'mean' or 'median', got {spec.statistic!r}")
    series, dropped = _series(rows, spec)
    if not series:
        raise PlotError("Nothing to plot: summary has no finite points")

    figure = Figure(figsize=(spec.width, spec.height), dpi=spec.dpi)
    FigureCanvasAgg(figure)
    ax = figure.add_subplot(111)
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")

    lines = {}
    for idx, (algorithm, points) in enumerate(sorted(series.items())):
        xs, ys = zip(*points)
        (line,) = ax.plot(xs, ys, marker="o", color=COLORS[idx % len(COLORS)], label=algorithm)
        line.set_gid(f"series-{algorithm}")
        lines[algorithm] = line

    ax.set_title(spec.title)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    figure.tight_layout()
    # фиксирует пределы осей, после этого transData стабилен
    figure.canvas.draw()
    return RenderedPlot(figure=figure, lines=lines, dropped=dropped)
