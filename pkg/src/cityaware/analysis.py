"""Temporal aggregation and summary statistics over awareness matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from .errors import ConfigError, ValidationError
from .indices import IndexVector
from .model import AwarenessMatrix, CityCatalog, Period, Tier, WeightMatrix, require_valid
from .spatial import SpatialConfig, travel_time_matrix

__all__ = [
    "DEFAULT_THRESHOLDS",
    "YearlyMatrix",
    "BandCurve",
    "DominanceCounts",
    "median_matrix",
    "yearly_median",
    "index_delta",
    "group_labels",
    "group_mean",
    "pearson",
    "dominance_counts",
    "rank_tail",
    "restricted_index",
    "band_improvement",
]

# 0.5 h steps from 0.5 h to 6 h
DEFAULT_THRESHOLDS = tuple(0.5 * k for k in range(1, 13))


@dataclass(frozen=True, eq=False)
class YearlyMatrix:
    """Per-cell median of the monthly matrices of one calendar year.

    Exposes ``period``, ``cities`` and ``cells`` so it can be passed
    anywhere an :class:`AwarenessMatrix` is expected via :meth:`as_matrix`.
    """

    year: int
    cities: tuple[str, ...]
    cells: np.ndarray

    @property
    def period(self) -> Period:
        return Period.year(self.year)

    def as_matrix(self) -> AwarenessMatrix:
        return AwarenessMatrix(self.period, self.cities, self.cells)


@dataclass(frozen=True)
class BandCurve:
    thresholds: tuple[float, ...]
    group: str
    kind: str
    deltas: tuple[float, ...]

    def __post_init__(self):
        if len(self.thresholds) != len(self.deltas):
            raise ValidationError("thresholds and deltas differ in length")
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValidationError("thresholds must be strictly increasing")


@dataclass(frozen=True)
class DominanceCounts:
    count_over_target: int
    count_over_self: int
    total_offdiag: int

    @property
    def share_over_target(self) -> float:
        return self.count_over_target / self.total_offdiag if self.total_offdiag else 0.0

    @property
    def share_over_self(self) -> float:
        return self.count_over_self / self.total_offdiag if self.total_offdiag else 0.0


def median_matrix(matrices: Sequence[AwarenessMatrix], period: Period | None = None) -> AwarenessMatrix:
    """Cellwise median; an even count averages the two middle values."""
    if not matrices:
        raise ValidationError("median of zero matrices")
    cities = matrices[0].cities
    for m in matrices[1:]:
        if m.cities != cities:
            raise ValidationError("matrices cover different city lists")
    stack = np.stack([np.asarray(m.cells, dtype=float) for m in matrices])
    if period is None:
        period = Period(min(m.period.start for m in matrices), max(m.period.end for m in matrices))
    return AwarenessMatrix(period, cities, np.median(stack, axis=0))


def yearly_median(monthly: Sequence[AwarenessMatrix]) -> YearlyMatrix:
    if not 1 <= len(monthly) <= 12:
        raise ValidationError(f"expected 1 to 12 monthly matrices, got {len(monthly)}")
    years = {y for m in monthly for y in (m.period.start.year, m.period.end.year)}
    if len(years) != 1:
        raise ValidationError(f"monthly matrices span several years: {sorted(years)}")
    year = years.pop()
    agg = median_matrix(monthly, Period.year(year))
    return YearlyMatrix(year, agg.cities, agg.cells)


def index_delta(late: IndexVector, early: IndexVector, allow_kind_mismatch: bool = False) -> np.ndarray:
    """Element-wise ``late - early``, aligned to ``late.cities``.

    Set ``allow_kind_mismatch`` to difference two kinds from the same period,
    e.g. IAI minus OAI.
    """
    if late.cities != early.cities:
        raise ValidationError("index vectors cover different city lists")
    if late.kind != early.kind and not allow_kind_mismatch:
        raise ValidationError(f"cannot difference {late.kind} and {early.kind}")
    return late.values - early.values


def group_labels(
    cities: Sequence[str],
    catalog: CityCatalog,
    grouping: Literal["central_vs_tc", "tier"] | Mapping[str, str] = "central_vs_tc",
) -> list[str]:
    if isinstance(grouping, Mapping):
        lookup = grouping
    elif grouping == "tier":
        lookup = {c: catalog[c].tier.value for c in cities}
    elif grouping == "central_vs_tc":
        lookup = {}
        for c in cities:
            tier = catalog[c].tier
            if tier.central:
                lookup[c] = "central"
            elif tier is Tier.TC:
                lookup[c] = "non_central"
    else:
        raise ConfigError(f"unknown grouping {grouping!r}")
    labels = []
    for c in cities:
        if c not in lookup:
            raise ValidationError(f"city {c} is not assigned to a group")
        labels.append(lookup[c])
    return labels


def group_mean(
    v: IndexVector,
    catalog: CityCatalog,
    grouping: Literal["central_vs_tc", "tier"] | Mapping[str, str] = "central_vs_tc",
) -> dict[str, float]:
    """Arithmetic mean of ``v`` within each group, groups in first-seen order."""
    sums: dict[str, list[float]] = {}
    for label, value in zip(group_labels(v.cities, catalog, grouping), v.values):
        sums.setdefault(label, []).append(float(value))
    return {g: math.fsum(vals) / len(vals) for g, vals in sums.items()}


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("series must be one-dimensional and equally long")
    if len(x) < 3:
        raise ValidationError("correlation needs at least three observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValidationError("zero variance series")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def dominance_counts(m: AwarenessMatrix) -> DominanceCounts:
    """Count off-diagonal cells exceeding the target's or the poster's local-awareness."""
    c = np.asarray(m.cells, dtype=float)
    n = c.shape[0]
    diag = np.diag(c)
    off = ~np.eye(n, dtype=bool)
    over_target = (c > diag[np.newaxis, :]) & off
    over_self = (c > diag[:, np.newaxis]) & off
    return DominanceCounts(int(over_target.sum()), int(over_self.sum()), n * (n - 1))


def rank_tail(m: AwarenessMatrix) -> list[tuple[int, float]]:
    """Off-diagonal values sorted descending with 1-based ranks.

    Ties keep row-major catalog order.
    """
    c = np.asarray(m.cells)
    n = c.shape[0]
    values = [c[i, j] for i in range(n) for j in range(n) if i != j]
    values.sort(key=lambda v: -v)
    return [(k + 1, v.item()) for k, v in enumerate(values)]


def restricted_index(
    m: AwarenessMatrix,
    w: WeightMatrix,
    hours: np.ndarray,
    threshold: float,
    kind: Literal["SIAI", "SOAI"],
) -> np.ndarray:
    """SIAI or SOAI summing only partners reachable within ``threshold`` hours.

    Weights keep their global normalization; far partners are simply dropped.
    """
    require_valid(m)
    if tuple(w.cities) != m.cities:
        raise ValidationError("weight matrix does not match matrix cities")
    c = np.array(m.cells, dtype=float)
    np.fill_diagonal(c, 0.0)
    mask = np.asarray(hours) <= threshold
    weights = np.where(mask, w.w, 0.0)
    if kind == "SIAI":
        num = (c.T * weights).sum(axis=1)
    elif kind == "SOAI":
        num = (c * weights).sum(axis=1)
    else:
        raise ConfigError(f"band kind must be SIAI or SOAI, not {kind!r}")
    return num / np.diag(m.cells).astype(float)


def band_improvement(
    early: AwarenessMatrix,
    late: AwarenessMatrix,
    w: WeightMatrix,
    catalog: CityCatalog,
    cfg: SpatialConfig,
    thresholds: Iterable[float] = DEFAULT_THRESHOLDS,
    kind: Literal["SIAI", "SOAI"] = "SIAI",
) -> dict[str, BandCurve]:
    """Group-mean change of a travel-time-restricted index, per threshold.

    Partners count toward a city's index when the travel time is at most the
    threshold (cumulative bands). Returns one curve per group, keyed
    ``central`` and ``non_central``.
    """
    thresholds = tuple(float(t) for t in thresholds)
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ConfigError("thresholds must be strictly increasing")
    if early.cities != late.cities:
        raise ValidationError("early and late matrices cover different cities")
    hours = travel_time_matrix(catalog.subset(early.cities), cfg)
    labels = np.array(group_labels(early.cities, catalog, "central_vs_tc"))
    curves = {}
    for group in ("central", "non_central"):
        sel = labels == group
        if not sel.any():
            raise ValidationError(f"group {group} has no cities")
        deltas = []
        for t in thresholds:
            d = restricted_index(late, w, hours, t, kind) - restricted_index(early, w, hours, t, kind)
            deltas.append(float(d[sel].mean()))
        curves[group] = BandCurve(thresholds, group, kind, tuple(deltas))
    return curves
