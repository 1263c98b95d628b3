"""Chart rendering: series/geometry inputs and SVG renderers."""

from .render import (
    ChartOptions,
    bin_colors,
    format_value,
    project_top2,
    render_bar,
    render_choropleth,
    render_cluster_scatter,
    render_trend,
)
from .series import RegionGeometry, Series, load_geojson, quantile_bins, series_from_table

__all__ = [
    "ChartOptions", "RegionGeometry", "Series",
    "bin_colors", "format_value", "load_geojson", "project_top2",
    "quantile_bins", "render_bar", "render_choropleth",
    "render_cluster_scatter", "render_trend", "series_from_table",
]
