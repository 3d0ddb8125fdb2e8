"""Per-city relatedness indices computed from an awareness matrix.

All indices except GAI are ratios of counts normalized by local-awareness
(the diagonal), so every function here refuses matrices with a zero
diagonal cell instead of producing infinities.

In-awareness comes in two conventions. ``canonical`` normalizes the
awareness a city *receives* by its own local-awareness::

    IAI_i = sum_{j != i} C[j, i] / C[i, i]

``paper_literal`` keeps the alternative printed form, which sums the
outgoing counts normalized by each target's local-awareness::

    IAI_i = sum_{j != i} C[i, j] / C[j, j]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ValidationError
from .model import AwarenessMatrix, WeightMatrix, require_valid

__all__ = [
    "IndexVector",
    "awareness_index",
    "spatial_awareness_index",
    "gai_reference",
]

Direction = Literal["in", "out"]
Convention = Literal["canonical", "paper_literal"]
KINDS = ("IAI", "OAI", "SIAI", "SOAI", "GAI")


@dataclass(frozen=True, eq=False)
class IndexVector:
    cities: tuple[str, ...]
    values: np.ndarray
    kind: str
    convention: str = "canonical"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.cities),):
            raise ValidationError(
                f"{self.kind}: {values.shape[0]} values for {len(self.cities)} cities"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError(f"{self.kind}: non-finite index value")
        values.setflags(write=False)
        object.__setattr__(self, "cities", tuple(self.cities))
        object.__setattr__(self, "values", values)
        if self.kind not in KINDS:
            raise ValidationError(f"unknown index kind {self.kind!r}")

    def __getitem__(self, city_id: str) -> float:
        return float(self.values[self.cities.index(city_id)])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.cities, self.values.tolist()))


def _offdiag(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    np.fill_diagonal(a, 0.0)
    return a


def _check_weights(m: AwarenessMatrix, w: WeightMatrix) -> np.ndarray:
    if tuple(w.cities) != tuple(m.cities):
        raise ValidationError(
            f"weight matrix cities {list(w.cities)} do not match matrix cities {list(m.cities)}"
        )
    return np.asarray(w.w, dtype=float)


def awareness_index(
    m: AwarenessMatrix,
    direction: Direction = "in",
    convention: Convention = "canonical",
) -> IndexVector:
    """In- or out-awareness index (IAI / OAI).

    >>> import numpy as np
    >>> from cityaware.model import AwarenessMatrix, Period
    >>> m = AwarenessMatrix(Period.year(2010), ("a", "b", "c"),
    ...                     np.array([[100, 20, 10], [30, 200, 40], [5, 15, 50]]))
    >>> awareness_index(m, "in").values.round(3).tolist()
    [0.35, 0.175, 1.0]
    >>> awareness_index(m, "out").values.round(3).tolist()
    [0.3, 0.35, 0.4]
    """
    require_valid(m)
    c = _offdiag(m.cells)
    diag = m.diagonal.astype(float)
    if direction == "out":
        return IndexVector(m.cities, c.sum(axis=1) / diag, "OAI", convention)
    if direction != "in":
        raise ValueError(f"direction must be 'in' or 'out', not {direction!r}")
    if convention == "canonical":
        values = c.sum(axis=0) / diag
    elif convention == "paper_literal":
        values = (c / diag[np.newaxis, :]).sum(axis=1)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return IndexVector(m.cities, values, "IAI", convention)


def spatial_awareness_index(
    m: AwarenessMatrix, w: WeightMatrix, direction: Direction = "in"
) -> IndexVector:
    """Spatially weighted in/out-awareness (SIAI / SOAI).

    ``SIAI_i = sum_{j != i} C[j, i] * w[i, j] / C[i, i]`` and
    ``SOAI_i = sum_{j != i} C[i, j] * w[i, j] / C[i, i]``.
    """
    require_valid(m)
    weights = _check_weights(m, w)
    c = _offdiag(m.cells)
    diag = m.diagonal.astype(float)
    if direction == "in":
        return IndexVector(m.cities, (c.T * weights).sum(axis=1) / diag, "SIAI")
    if direction == "out":
        return IndexVector(m.cities, (c * weights).sum(axis=1) / diag, "SOAI")
    raise ValueError(f"direction must be 'in' or 'out', not {direction!r}")


def gai_reference(m: AwarenessMatrix, g, populations) -> IndexVector:
    """Population-normalized global awareness index.

    Parameters
    ----------
    m : AwarenessMatrix
    g : (n, n) array
        Normalized global distances (great-circle / half circumference).
    populations : sequence of float
        Per-city population in matrix order; every entry must be positive.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (m.n, m.n):
        raise ValidationError(f"distance matrix shape {g.shape} does not match {m.n} cities")
    pops = [None if p is None else float(p) for p in populations]
    if len(pops) != m.n:
        raise ValidationError(f"{len(pops)} populations for {m.n} cities")
    for cid, p in zip(m.cities, pops):
        if p is None or not p > 0:
            raise ValidationError(f"missing or nonpositive population: {cid}")
    c = _offdiag(m.cells)
    return IndexVector(m.cities, (c.T * g).sum(axis=1) / np.array(pops), "GAI")
