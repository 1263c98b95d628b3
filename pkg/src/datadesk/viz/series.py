"""Chart inputs: keyed series, GeoJSON region geometry, quantile binning."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import VizError


@dataclass(frozen=True)
class Series:
    name: str
    points: tuple[tuple[str, float], ...]  # ordered (key, value) pairs

    def __post_init__(self):
        keys = [k for k, _ in self.points]
        if len(set(keys)) != len(keys):
            raise VizError(f"series {self.name!r} has duplicate keys")
        for k, v in self.points:
            if not math.isfinite(v):
                raise VizError(f"series {self.name!r} has a non-finite value at {k!r}")

    @property
    def keys(self) -> list[str]:
        return [k for k, _ in self.points]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.points]


def series_from_table(table, key_column: str, value_column: str, name: str | None = None) -> Series:
    """Build a Series from two columns of a result table, skipping Null keys."""
    keys = table.column(key_column)
    values = table.column(value_column)
    points = tuple(
        (str(k), float(v))
        for k, v in zip(keys, values)
        if k is not None and v is not None
    )
    return Series(name or f"{value_column} by {key_column}", points)


@dataclass
class RegionGeometry:
    """Region id -> list of polygon rings (each a closed list of (lon, lat))."""

    regions: dict[str, list[list[tuple[float, float]]]]
    id_property: str

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [x for rings in self.regions.values() for ring in rings for x, _ in ring]
        ys = [y for rings in self.regions.values() for ring in rings for _, y in ring]
        if not xs:
            raise VizError("geometry holds no coordinates")
        return min(xs), min(ys), max(xs), max(ys)


def _close_ring(ring: list[tuple[float, float]]) -> list[tuple[float, float]]:
    return ring if ring and ring[0] == ring[-1] else ring + [ring[0]]


def load_geojson(path: str | Path, id_property: str = "district") -> RegionGeometry:
    """Load a GeoJSON FeatureCollection keyed by the given feature property."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("type") != "FeatureCollection":
        raise VizError(f"{path}: expected a GeoJSON FeatureCollection")
    regions: dict[str, list[list[tuple[float, float]]]] = {}
    for feature in data.get("features", []):
        props = feature.get("properties", {})
        region_id = props.get(id_property)
        if region_id is None:
            raise VizError(f"{path}: feature lacks the {id_property!r} property")
        if region_id in regions:
            raise VizError(f"{path}: duplicate region id {region_id!r}")
        geom = feature.get("geometry", {})
        gtype = geom.get("type")
        if gtype == "Polygon":
            polys = [geom["coordinates"]]
        elif gtype == "MultiPolygon":
            polys = geom["coordinates"]
        else:
            raise VizError(f"{path}: region {region_id!r} has unsupported geometry {gtype!r}")
        rings = [
            _close_ring([(float(x), float(y)) for x, y in ring])
            for poly in polys
            for ring in poly[:1]  # exterior rings only; holes are out of scope
        ]
        regions[str(region_id)] = rings
    return RegionGeometry(regions, id_property)


def quantile_bins(values: list[float], bins: int = 5) -> list[int]:
    """Assign each value a bin in [0, bins) by linear-interpolation quantiles.

    bin(v) counts the interior quantile thresholds strictly below v, so the
    maximum lands in the darkest bin, equal values share a bin, and the
    assignment is monotone in v.
    """
    if bins < 1:
        raise VizError("bin count must be at least 1")
    if not values:
        return []
    thresholds = np.quantile(np.asarray(values, dtype=float),
                             [i / bins for i in range(1, bins)], method="linear")
    return [int(sum(v > t for t in thresholds)) for v in values]
