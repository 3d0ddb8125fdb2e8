"""Synthetic gravity-model awareness matrices.

Used as a ground-truth generator: counts follow ``k * m_i * m_j / d_ij**beta``
off the diagonal and ``alpha * m_i`` on it, optionally perturbed by
median-one lognormal noise, and a pair's interaction can be boosted to
mimic a new rail channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, ValidationError
from .model import AwarenessMatrix, CityCatalog, InteractionRecord, Period, matrix_to_records
from .spatial import DEFAULT_CONFIG, SpatialConfig, distance_matrix

__all__ = ["SynthParams", "generate_gravity", "inject_channel", "generate_series"]


@dataclass(frozen=True)
class SynthParams:
    masses: tuple[float, ...]
    beta: float = 1.0
    k: float = 1.0
    alpha: float = 1.0
    seed: int = 0
    noise: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "masses", tuple(float(x) for x in self.masses))
        if any(not x > 0 for x in self.masses):
            raise ConfigError("masses must be positive")
        if self.beta < 0:
            raise ConfigError(f"beta must be >= 0, got {self.beta}")
        if not self.k > 0:
            raise ConfigError(f"k must be positive, got {self.k}")
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.noise < 0:
            raise ConfigError(f"noise sigma must be >= 0, got {self.noise}")


def _round_counts(x: np.ndarray) -> np.ndarray:
    # round half up, never below zero
    return np.maximum(np.floor(x + 0.5), 0).astype(np.int64)


def generate_gravity(
    catalog: CityCatalog,
    p: SynthParams,
    cfg: SpatialConfig = DEFAULT_CONFIG,
    period: Period | None = None,
    rng: np.random.Generator | None = None,
) -> AwarenessMatrix:
    """Gravity-model counts for the cities of ``catalog`` in catalog order.

    ``rng`` overrides the generator seeded from ``p.seed``; the noise matrix
    is always drawn in full so the stream position does not depend on
    ``p.noise``.
    """
    n = len(catalog)
    if len(p.masses) != n:
        raise ConfigError(f"{len(p.masses)} masses for {n} cities")
    d = distance_matrix(catalog, cfg)
    off = ~np.eye(n, dtype=bool)
    if p.beta > 0 and np.any(d[off] <= 0):
        raise ValidationError("co-located cities cannot use a positive distance decay")
    if rng is None:
        rng = np.random.default_rng(p.seed)
    eps = rng.standard_normal((n, n))
    factor = np.exp(p.noise * eps)
    m = np.asarray(p.masses)
    decay = np.where(off, d, 1.0) ** p.beta
    cells = p.k * np.outer(m, m) / decay * factor
    np.fill_diagonal(cells, p.alpha * m)
    if period is None:
        period = Period.month(2010, 1)
    return AwarenessMatrix(period, catalog.ids, _round_counts(cells))


def inject_channel(m: AwarenessMatrix, i: str, j: str, gamma: float) -> AwarenessMatrix:
    """Copy of ``m`` with ``C_ij`` and ``C_ji`` scaled by ``gamma`` (rounded)."""
    if i == j:
        raise ValidationError("channel pair must be distinct cities")
    if not gamma >= 1:
        raise ValidationError(f"gamma must be >= 1, got {gamma}")
    a, b = m.index(i), m.index(j)
    cells = np.array(m.cells)
    if gamma != 1:
        for r, c in ((a, b), (b, a)):
            scaled = cells[r, c] * gamma
            cells[r, c] = scaled if cells.dtype.kind == "f" else np.floor(scaled + 0.5)
    return AwarenessMatrix(m.period, m.cities, cells, m.duplicate_count)


def generate_series(
    catalog: CityCatalog,
    p: SynthParams,
    periods: Sequence[Period],
    cfg: SpatialConfig = DEFAULT_CONFIG,
    channel: tuple[str, str] | None = None,
    gamma: float = 1.0,
    channel_from: Period | None = None,
) -> list[InteractionRecord]:
    """Records for several periods, one independent noise stream per period.

    When ``channel`` is given, ``gamma`` boosts that pair in every period
    starting at or after ``channel_from`` (all periods if omitted).
    """
    streams = np.random.SeedSequence(p.seed).spawn(len(periods))
    records: list[InteractionRecord] = []
    for period, seq in zip(periods, streams):
        m = generate_gravity(catalog, p, cfg, period, np.random.default_rng(seq))
        if channel is not None and (channel_from is None or period.start >= channel_from.start):
            m = inject_channel(m, channel[0], channel[1], gamma)
        records.extend(matrix_to_records(m))
    return records
