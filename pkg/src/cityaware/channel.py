"""Channel-effect indices for a pair of rail endpoint cities.

``TS_ij`` is city i's share of city j's spatially weighted in-awareness,
``TE_ij`` is city j's share of the spatially weighted GDP around city i.
Under exchangeable contributors both shares average ``1 / (n - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .indices import spatial_awareness_index
from .model import AwarenessMatrix, CityCatalog, WeightMatrix, require_valid

__all__ = [
    "ChannelResult",
    "ts_directed",
    "ts_matrix",
    "ts_combined",
    "ts_expected",
    "te_directed",
    "channel_result",
]


@dataclass(frozen=True)
class ChannelResult:
    pair: tuple[str, str]
    ts_ij: float
    ts_ji: float
    ts_combined: float
    te_ij: float
    te_ji: float
    expected: float
    n: int
    # set when one directed share is zero and ts_combined was forced to 0
    zero_share: bool = False


def ts_directed(m: AwarenessMatrix, w: WeightMatrix, i: str, j: str) -> float:
    """``TS_ij = (C_ij / C_jj * w_ij) / SIAI_j``."""
    if i == j:
        raise ValidationError("channel pair must be distinct cities")
    require_valid(m)
    a, b = m.index(i), m.index(j)
    siai = spatial_awareness_index(m, w, "in")
    siai_j = siai.values[b]
    if not siai_j > 0:
        raise ValidationError(f"city {j} receives no spatially weighted awareness (SIAI = 0)")
    return float(m.cells[a, b] / m.cells[b, b] * w.w[a, b] / siai_j)


def ts_matrix(m: AwarenessMatrix, w: WeightMatrix) -> np.ndarray:
    """All directed shares at once: ``out[i, j] = TS_ij``, zero diagonal.

    Columns whose city receives no weighted awareness are NaN.
    """
    require_valid(m)
    siai = spatial_awareness_index(m, w, "in").values
    c = np.array(m.cells, dtype=float)
    np.fill_diagonal(c, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = c / np.diag(m.cells).astype(float)[np.newaxis, :] * w.w / siai[np.newaxis, :]
    out[:, siai == 0] = np.nan
    return out


def ts_combined(ts_ij: float, ts_ji: float) -> float:
    """Harmonic mean of the two directed shares.

    A zero share yields 0 (the harmonic-mean limit); negative input raises.

    >>> round(ts_combined(0.5, 0.25), 6)
    0.333333
    """
    if ts_ij < 0 or ts_ji < 0 or math.isnan(ts_ij) or math.isnan(ts_ji):
        raise ValidationError(f"TS inputs must be nonnegative: ({ts_ij}, {ts_ji})")
    if ts_ij == 0 or ts_ji == 0:
        return 0.0
    return 2.0 * ts_ij * ts_ji / (ts_ij + ts_ji)


def ts_expected(n: int) -> float:
    """Expected directed share when all ``n - 1`` contributors are exchangeable."""
    if n < 2:
        raise ValidationError(f"expected TS needs at least two cities, got {n}")
    return 1.0 / (n - 1)


def _gdp_vector(catalog: CityCatalog, cities) -> np.ndarray:
    out = []
    for cid in cities:
        gdp = catalog[cid].gdp
        if gdp is None:
            raise ValidationError(f"missing GDP for {cid}")
        out.append(gdp)
    return np.array(out, dtype=float)


def te_directed(catalog: CityCatalog, w: WeightMatrix, i: str, j: str) -> float:
    """``TE_ij = GDP_j * w_ij / sum_{k != i} GDP_k * w_ik``."""
    if i == j:
        raise ValidationError("channel pair must be distinct cities")
    gdp = _gdp_vector(catalog, w.cities)
    a, b = w.cities.index(i), w.cities.index(j)
    field = gdp * w.w[a]
    field[a] = 0.0
    total = field.sum()
    if not total > 0:
        raise ValidationError(f"no weighted GDP around {i}")
    return float(field[b] / total)


def channel_result(
    m: AwarenessMatrix, w: WeightMatrix, catalog: CityCatalog, i: str, j: str
) -> ChannelResult:
    """TS and TE in both directions for one endpoint pair on the full matrix."""
    if i == j:
        raise ValidationError("channel pair must be distinct cities")
    ts_ij = ts_directed(m, w, i, j)
    ts_ji = ts_directed(m, w, j, i)
    combined = ts_combined(ts_ij, ts_ji)
    return ChannelResult(
        pair=(i, j),
        ts_ij=ts_ij,
        ts_ji=ts_ji,
        ts_combined=combined,
        te_ij=te_directed(catalog, w, i, j),
        te_ji=te_directed(catalog, w, j, i),
        expected=ts_expected(m.n),
        n=m.n,
        zero_share=(ts_ij == 0 or ts_ji == 0),
    )
