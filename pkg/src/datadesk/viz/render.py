"""SVG chart renderers built on matplotlib.

All renderers are pure functions of (input, options) and yield byte-identical
SVG for identical input: the SVG hash salt is pinned, creation dates are
suppressed, and text stays as real <text> nodes (svg.fonttype=none) so tests
and the chat UI can grep plotted values. Matplotlib itself is not
thread-safe, so rendering serializes behind a module lock.
"""

from __future__ import annotations

import io
import threading
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg", force=False)

from matplotlib.backends.backend_svg import FigureCanvasSVG  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402
from matplotlib.patches import Polygon as MplPolygon  # noqa: E402

from ..errors import VizError  # noqa: E402
from .series import RegionGeometry, Series, quantile_bins  # noqa: E402

_RC = {
    "svg.fonttype": "none",
    "svg.hashsalt": "datadesk",
    "figure.dpi": 100,
    "font.size": 9.0,
    "axes.titlesize": 11.0,
}

_RENDER_LOCK = threading.Lock()

_NEUTRAL = "#d9d9d9"
_LIGHT = (0.933, 0.953, 1.0)   # light blue
_DARK = (0.031, 0.318, 0.612)  # dark blue
_MARKERS = ["o", "s", "^", "D", "v", "P", "X", "*"]
_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def format_value(value: float) -> str:
    """Numeric format used for all embedded value labels: integers bare,
    floats with up to 6 significant digits."""
    if float(value) == int(value):
        return str(int(value))
    return f"{value:.6g}"


def _shade(fraction: float) -> tuple[float, float, float]:
    return tuple(l + (d - l) * fraction for l, d in zip(_LIGHT, _DARK))


def bin_colors(bins: int) -> list[tuple[float, float, float]]:
    if bins == 1:
        return [_shade(1.0)]
    return [_shade(i / (bins - 1)) for i in range(bins)]


def _save(fig: Figure) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def _new_figure(width: float = 8.0, height: float = 4.5) -> tuple[Figure, object]:
    fig = Figure(figsize=(width, height))
    FigureCanvasSVG(fig)
    return fig, fig.add_subplot()


@dataclass(frozen=True)
class ChartOptions:
    title: str = ""
    time_grain: str = "month"  # "month" | "year"; annotation only


def render_trend(series: Series, options: ChartOptions = ChartOptions()) -> bytes:
    """Line plot of an ordered series; every key and value appears as text."""
    if not series.points:
        raise VizError("cannot render an empty series")
    with _RENDER_LOCK, matplotlib.rc_context(_RC):
        fig, ax = _new_figure()
        xs = np.arange(len(series.points))
        values = series.values
        ax.plot(xs, values, marker="o", color=_COLORS[0], linewidth=1.5)
        ax.set_xticks(xs, series.keys, rotation=60, ha="right")
        for x, v in zip(xs, values):
            ax.annotate(format_value(v), (x, v), textcoords="offset points",
                        xytext=(0, 6), ha="center", fontsize=7)
        ax.set_title(options.title or series.name)
        ax.set_ylabel(series.name)
        ax.margins(y=0.15)
        ax.grid(True, alpha=0.3)
        fig.subplots_adjust(bottom=0.28)
        return _save(fig)


def render_bar(series: Series, options: ChartOptions = ChartOptions()) -> bytes:
    """Vertical bars in key order with value labels above each bar."""
    if not series.points:
        raise VizError("cannot render an empty series")
    with _RENDER_LOCK, matplotlib.rc_context(_RC):
        fig, ax = _new_figure()
        xs = np.arange(len(series.points))
        values = series.values
        ax.bar(xs, values, color=_COLORS[0], width=0.7)
        ax.set_xticks(xs, series.keys, rotation=60, ha="right")
        for x, v in zip(xs, values):
            ax.annotate(format_value(v), (x, v), textcoords="offset points",
                        xytext=(0, 3), ha="center", fontsize=7)
        ax.set_title(options.title or series.name)
        ax.set_ylabel(series.name)
        ax.margins(y=0.15)
        fig.subplots_adjust(bottom=0.28)
        return _save(fig)


def render_choropleth(
    counts: Series,
    geometry: RegionGeometry,
    bins: int = 5,
    title: str = "",
) -> bytes:
    """Region map colored by quantile bin, darker shades for higher counts.

    Regions without a count render neutral; counts naming a region with no
    geometry are listed in an embedded warnings line rather than failing.
    The map is a plate carrée (equirectangular) view fitted to the geometry
    bounds.
    """
    if not geometry.regions:
        raise VizError("geometry holds no regions")
    values = dict(counts.points)
    assignments = dict(zip(counts.keys, quantile_bins(counts.values, bins)))
    colors = bin_colors(bins)
    missing = [k for k in counts.keys if k not in geometry.regions]

    with _RENDER_LOCK, matplotlib.rc_context(_RC):
        fig, ax = _new_figure(7.0, 7.0)
        for region in sorted(geometry.regions):
            rings = geometry.regions[region]
            fill = colors[assignments[region]] if region in assignments else _NEUTRAL
            for ring in rings:
                ax.add_patch(MplPolygon(ring, closed=True, facecolor=fill,
                                        edgecolor="#555555", linewidth=0.6))
            cx = float(np.mean([x for ring in rings for x, _ in ring]))
            cy = float(np.mean([y for ring in rings for _, y in ring]))
            label = region
            if region in values:
                label += f"\n{format_value(values[region])}"
            ax.annotate(label, (cx, cy), ha="center", va="center", fontsize=6)
        min_x, min_y, max_x, max_y = geometry.bounds()
        pad_x = 0.05 * (max_x - min_x or 1.0)
        pad_y = 0.05 * (max_y - min_y or 1.0)
        ax.set_xlim(min_x - pad_x, max_x + pad_x)
        ax.set_ylim(min_y - pad_y, max_y + pad_y)
        ax.set_aspect("equal")
        ax.set_xlabel("longitude")
        ax.set_ylabel("latitude")
        ax.set_title(title or counts.name)
        # Legend: one swatch per bin with the observed value range.
        binned: dict[int, list[float]] = {}
        for key, value in counts.points:
            binned.setdefault(assignments[key], []).append(value)
        handles = []
        import matplotlib.patches as mpatches
        for b in range(bins):
            if b in binned:
                lo, hi = min(binned[b]), max(binned[b])
                text = f"bin {b}: {format_value(lo)}-{format_value(hi)}"
            else:
                text = f"bin {b}: (empty)"
            handles.append(mpatches.Patch(facecolor=colors[b], edgecolor="#555555", label=text))
        handles.append(mpatches.Patch(facecolor=_NEUTRAL, edgecolor="#555555", label="no data"))
        ax.legend(handles=handles, loc="lower right", fontsize=6, title=f"{bins}-quantile bins")
        if missing:
            fig.text(0.01, 0.01, "warnings: no geometry for " + ", ".join(sorted(missing)),
                     fontsize=6, color="#aa0000")
        return _save(fig)


def project_top2(features: np.ndarray) -> np.ndarray:
    """Top-2 principal-component scores with a deterministic sign convention:
    the first nonzero loading of each component is positive."""
    if features.shape[0] < 2:
        raise VizError("need at least 2 rows to project")
    centered = features - features.mean(axis=0)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    coords = np.zeros((features.shape[0], 2))
    for c in range(min(2, vt.shape[0])):
        loading = vt[c]
        nonzero = np.nonzero(np.abs(loading) > 1e-12)[0]
        if len(nonzero) and loading[nonzero[0]] < 0:
            loading = -loading
        if singular[c] > 1e-12:
            coords[:, c] = centered @ loading
    return coords


def render_cluster_scatter(clustering, title: str = "") -> bytes:
    """2-D PCA scatter of a Clustering result, one marker class per cluster,
    legend entries carrying the cluster sizes."""
    features = clustering.features.data
    if features.shape[0] < 2:
        raise VizError("need at least 2 rows to render a cluster scatter")
    coords = project_top2(features)
    assignments = np.asarray(clustering.assignments)
    sizes = clustering.sizes()
    with _RENDER_LOCK, matplotlib.rc_context(_RC):
        fig, ax = _new_figure(7.0, 5.5)
        for cluster in range(clustering.k):
            mask = assignments == cluster
            ax.scatter(
                coords[mask, 0], coords[mask, 1],
                marker=_MARKERS[cluster % len(_MARKERS)],
                color=_COLORS[cluster % len(_COLORS)],
                s=28, linewidths=0.4, edgecolors="#333333",
                label=f"cluster {cluster} (n={sizes[cluster]})",
            )
        ax.set_xlabel("component 1")
        ax.set_ylabel("component 2")
        ax.set_title(title or "cluster scatter")
        ax.legend(loc="best", fontsize=8)
        ax.grid(True, alpha=0.3)
        return _save(fig)
