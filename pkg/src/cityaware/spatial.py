"""Distances, distance-proportional weights and rail travel times."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .errors import ConfigError, ValidationError
from .model import CityCatalog, CityEntry, WeightMatrix

__all__ = [
    "MEAN_EARTH_RADIUS_KM",
    "SpatialConfig",
    "great_circle_distance",
    "normalized_global_distance",
    "travel_time",
    "distance_matrix",
    "global_distance_matrix",
    "travel_time_matrix",
    "weight_matrix",
    "weights_from_distances",
]

MEAN_EARTH_RADIUS_KM = 6371.0088

Point = Union[CityEntry, "tuple[float, float]"]


@dataclass(frozen=True)
class SpatialConfig:
    earth_radius_km: float = MEAN_EARTH_RADIUS_KM
    hsr_speed_kmh: float = 300.0
    distance_source: Literal["great_circle", "chainage"] = "great_circle"

    def __post_init__(self):
        if not self.earth_radius_km > 0:
            raise ConfigError(f"earth radius must be positive: {self.earth_radius_km}")
        if not self.hsr_speed_kmh > 0:
            raise ConfigError(f"HSR speed must be positive: {self.hsr_speed_kmh}")
        if self.distance_source not in ("great_circle", "chainage"):
            raise ConfigError(f"unknown distance source {self.distance_source!r}")


DEFAULT_CONFIG = SpatialConfig()


def _latlon(p: Point) -> tuple[float, float]:
    if isinstance(p, CityEntry):
        return p.lat, p.lon
    lat, lon = p
    lat, lon = float(lat), float(lon)
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise ValidationError(f"coordinates out of range: ({lat}, {lon})")
    return lat, lon


def great_circle_distance(a: Point, b: Point, cfg: SpatialConfig = DEFAULT_CONFIG) -> float:
    """Haversine distance in km between two (lat, lon) points in degrees."""
    lat1, lon1 = map(math.radians, _latlon(a))
    lat2, lon2 = map(math.radians, _latlon(b))
    h = (
        math.sin((lat2 - lat1) / 2) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    )
    # clamp: rounding can push h a hair above 1 for antipodes
    return 2 * cfg.earth_radius_km * math.asin(math.sqrt(min(1.0, h)))


def normalized_global_distance(a: Point, b: Point, cfg: SpatialConfig = DEFAULT_CONFIG) -> float:
    """Great-circle distance as a fraction of half the Earth's circumference."""
    return great_circle_distance(a, b, cfg) / (math.pi * cfg.earth_radius_km)


def _distance(a: Point, b: Point, cfg: SpatialConfig) -> float:
    if cfg.distance_source == "chainage":
        if not (isinstance(a, CityEntry) and isinstance(b, CityEntry)):
            raise ValidationError("chainage distances need catalog entries")
        if a.chainage_km is None or b.chainage_km is None:
            missing = a.id if a.chainage_km is None else b.id
            raise ValidationError(f"missing chainage_km for {missing}")
        return abs(a.chainage_km - b.chainage_km)
    return great_circle_distance(a, b, cfg)


def travel_time(a: Point, b: Point, cfg: SpatialConfig = DEFAULT_CONFIG) -> float:
    """Hours at the configured average HSR speed."""
    return _distance(a, b, cfg) / cfg.hsr_speed_kmh


def distance_matrix(catalog: CityCatalog, cfg: SpatialConfig = DEFAULT_CONFIG) -> np.ndarray:
    entries = catalog.entries
    n = len(entries)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = _distance(entries[i], entries[j], cfg)
    return d


def global_distance_matrix(catalog: CityCatalog, cfg: SpatialConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Pairwise normalized global distances (always great-circle)."""
    gc = SpatialConfig(cfg.earth_radius_km, cfg.hsr_speed_kmh, "great_circle")
    return distance_matrix(catalog, gc) / (math.pi * cfg.earth_radius_km)


def travel_time_matrix(catalog: CityCatalog, cfg: SpatialConfig = DEFAULT_CONFIG) -> np.ndarray:
    return distance_matrix(catalog, cfg) / cfg.hsr_speed_kmh


def weights_from_distances(cities, d) -> WeightMatrix:
    """Scale a symmetric distance matrix so its largest entry is exactly 1."""
    d = np.asarray(d, dtype=float)
    if len(cities) < 2:
        raise ValidationError("weight matrix needs at least two cities")
    dmax = d.max()
    if not dmax > 0:
        raise ValidationError("all cities are co-located; weights undefined")
    w = d / dmax
    np.fill_diagonal(w, 0.0)
    return WeightMatrix(tuple(cities), w)


def weight_matrix(catalog: CityCatalog, cfg: SpatialConfig = DEFAULT_CONFIG) -> WeightMatrix:
    """Distance-proportional weights over exactly the cities in ``catalog``.

    The normalizing maximum is taken over this catalog, so weights change
    when the analyzed subset changes.
    """
    return weights_from_distances(catalog.ids, distance_matrix(catalog, cfg))
