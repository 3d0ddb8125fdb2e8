"""Core domain types and OD-matrix assembly.

A city catalog fixes the row/column order of every matrix built from it.
Matrices are immutable: the numpy buffers are marked read-only on
construction, so values can be shared freely between threads.
"""

from __future__ import annotations

import calendar
import enum
import logging
import math
import re
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CatalogError, CityResolutionError, PeriodError, ValidationError

log = logging.getLogger(__name__)

__all__ = [
    "Tier",
    "DEFAULT_TIERS",
    "CityEntry",
    "CityCatalog",
    "Period",
    "InteractionRecord",
    "AwarenessMatrix",
    "WeightMatrix",
    "MatrixDiagnostics",
    "PeriodReport",
    "IndexReport",
    "build_matrix",
    "validate_matrix",
    "require_valid",
    "matrix_to_records",
]


class Tier(str, enum.Enum):
    FC = "FC"  # first-tier city
    SC = "SC"  # provincial capital
    TC = "TC"  # prefecture-level city
    MC = "MC"  # county-level city, excluded by default

    @property
    def excludable(self) -> bool:
        return self is Tier.MC

    @property
    def central(self) -> bool:
        return self in (Tier.FC, Tier.SC)


DEFAULT_TIERS = frozenset({Tier.FC, Tier.SC, Tier.TC})


@dataclass(frozen=True)
class CityEntry:
    id: str
    canonical_name: str
    lat: float
    lon: float
    tier: Tier
    aliases: tuple[str, ...] = ()
    population: float | None = None
    gdp: float | None = None
    region_code: str | None = None
    chainage_km: float | None = None
    # alias used as the platform search term; None falls back to canonical_name
    query_alias: str | None = None

    def __post_init__(self):
        if not self.id or not self.id.strip():
            raise CatalogError("empty city id")
        if not -90.0 <= self.lat <= 90.0:
            raise CatalogError(f"latitude out of range for {self.id}: {self.lat}")
        if not -180.0 < self.lon <= 180.0:
            raise CatalogError(f"longitude out of range for {self.id}: {self.lon}")
        for name, value in (("population", self.population), ("gdp", self.gdp)):
            if value is not None and not (value > 0 and math.isfinite(value)):
                raise CatalogError(f"{name} must be positive for {self.id}: {value}")
        if self.query_alias is not None and self.query_alias not in self.aliases:
            raise CatalogError(f"query alias {self.query_alias!r} is not an alias of {self.id}")

    @property
    def query_term(self) -> str:
        return self.query_alias if self.query_alias is not None else self.canonical_name

    @property
    def coords(self) -> tuple[float, float]:
        return (self.lat, self.lon)


class CityCatalog:
    """Ordered, validated collection of cities.

    Lookup by id, canonical name or alias is exact after trimming
    surrounding whitespace. A name that could denote two different cities
    is rejected when the catalog is built, so ``resolve`` never has to
    guess.
    """

    def __init__(self, entries: Iterable[CityEntry] = ()):
        self.entries: tuple[CityEntry, ...] = tuple(entries)
        self._by_id: dict[str, CityEntry] = {}
        self._names: dict[str, str] = {}
        canonical: dict[str, str] = {}
        for e in self.entries:
            if e.id in self._by_id:
                raise CatalogError(f"duplicate city id {e.id!r}")
            self._by_id[e.id] = e
            if e.canonical_name in canonical:
                raise CatalogError(
                    f"duplicate canonical name {e.canonical_name!r} "
                    f"({canonical[e.canonical_name]}, {e.id})"
                )
            canonical[e.canonical_name] = e.id
        for e in self.entries:
            for name in (e.id, e.canonical_name, *e.aliases):
                key = name.strip()
                if not key:
                    continue
                owner = self._names.get(key)
                if owner is not None and owner != e.id:
                    raise CatalogError(
                        f"ambiguous name {key!r} shared by {owner} and {e.id}"
                    )
                self._names[key] = e.id

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[CityEntry]:
        return iter(self.entries)

    def __contains__(self, city_id: object) -> bool:
        return city_id in self._by_id

    def __getitem__(self, city_id: str) -> CityEntry:
        try:
            return self._by_id[city_id]
        except KeyError:
            raise CityResolutionError(f"unknown city id {city_id!r}") from None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CityCatalog) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"CityCatalog({len(self)} cities)"

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.entries)

    def index(self, city_id: str) -> int:
        return self.ids.index(self[city_id].id)

    def resolve(self, name: str) -> str:
        key = name.strip()
        try:
            return self._names[key]
        except KeyError:
            raise CityResolutionError(f"unknown city {name!r}") from None

    def filter(self, tiers: Iterable[Tier | str] | None = DEFAULT_TIERS) -> "CityCatalog":
        """Sub-catalog of the given tiers, order preserved. ``None`` keeps all."""
        if tiers is None:
            return self
        keep = {Tier(t) for t in tiers}
        return CityCatalog(e for e in self.entries if e.tier in keep)

    def subset(self, ids: Sequence[str]) -> "CityCatalog":
        """Sub-catalog in the order given by ``ids``."""
        return CityCatalog(self[i] for i in ids)


_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")
_YEAR_RE = re.compile(r"^(\d{4})$")


@dataclass(frozen=True, order=True)
class Period:
    """Closed calendar interval ``[start, end]``."""

    start: date
    end: date

    def __post_init__(self):
        if self.start > self.end:
            raise PeriodError(f"period start {self.start} after end {self.end}")

    @classmethod
    def month(cls, year: int, month: int) -> "Period":
        last = calendar.monthrange(year, month)[1]
        return cls(date(year, month, 1), date(year, month, last))

    @classmethod
    def year(cls, year: int) -> "Period":
        return cls(date(year, 1, 1), date(year, 12, 31))

    @classmethod
    def parse(cls, text: str) -> "Period":
        """Parse ``YYYY``, ``YYYY-MM`` or ``YYYY-MM-DD:YYYY-MM-DD``."""
        text = text.strip()
        try:
            if m := _YEAR_RE.match(text):
                return cls.year(int(m.group(1)))
            if m := _MONTH_RE.match(text):
                return cls.month(int(m.group(1)), int(m.group(2)))
            start, _, end = text.partition(":")
            return cls(date.fromisoformat(start), date.fromisoformat(end))
        except ValueError as exc:
            if isinstance(exc, PeriodError):
                raise
            raise PeriodError(f"malformed period {text!r}") from None

    @property
    def is_month(self) -> bool:
        return self == Period.month(self.start.year, self.start.month)

    @property
    def is_year(self) -> bool:
        return self == Period.year(self.start.year)

    @property
    def label(self) -> str:
        if self.is_year:
            return f"{self.start.year:04d}"
        if self.is_month:
            return f"{self.start.year:04d}-{self.start.month:02d}"
        return f"{self.start.isoformat()}_{self.end.isoformat()}"

    def contains(self, other: "Period") -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: "Period") -> bool:
        return self.start <= other.end and other.start <= self.end

    def months(self) -> list["Period"]:
        """Calendar months covered; the period must be whole months."""
        if self.start.day != 1 or self.end != Period.month(self.end.year, self.end.month).end:
            raise PeriodError(f"period {self.label} is not a whole number of months")
        out = []
        y, m = self.start.year, self.start.month
        while (y, m) <= (self.end.year, self.end.month):
            out.append(Period.month(y, m))
            y, m = (y + 1, 1) if m == 12 else (y, m + 1)
        return out

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class InteractionRecord:
    """Posts located in ``location_city`` whose text names ``toponym_city``."""

    toponym_city: str
    location_city: str
    count: int
    period: Period

    def __post_init__(self):
        if self.count < 0:
            raise ValidationError(f"negative count {self.count}")


def _frozen_array(values, dtype=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AwarenessMatrix:
    """Directed post counts for one period.

    ``cells[i, j]`` counts posts located in ``cities[i]`` that mention
    ``cities[j]``; the diagonal is local-awareness. Cells may be float when
    the matrix is an aggregate (e.g. a median over months).
    """

    period: Period
    cities: tuple[str, ...]
    cells: np.ndarray
    duplicate_count: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cities", tuple(self.cities))
        cells = np.asarray(self.cells)
        dtype = np.int64 if np.issubdtype(cells.dtype, np.integer) else np.float64
        object.__setattr__(self, "cells", _frozen_array(cells, dtype))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AwarenessMatrix)
            and self.period == other.period
            and self.cities == other.cities
            and self.cells.shape == other.cells.shape
            and bool(np.array_equal(self.cells, other.cells))
        )

    @property
    def n(self) -> int:
        return len(self.cities)

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.cells)

    def index(self, city_id: str) -> int:
        try:
            return self.cities.index(city_id)
        except ValueError:
            raise CityResolutionError(f"city {city_id!r} not in matrix") from None

    def value(self, location: str, toponym: str):
        return self.cells[self.index(location), self.index(toponym)]

    def permuted(self, order: Sequence[str]) -> "AwarenessMatrix":
        idx = [self.index(c) for c in order]
        return AwarenessMatrix(self.period, tuple(order), self.cells[np.ix_(idx, idx)])

    def with_cells(self, cells) -> "AwarenessMatrix":
        return AwarenessMatrix(self.period, self.cities, cells)


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    cities: tuple[str, ...]
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cities", tuple(self.cities))
        object.__setattr__(self, "w", _frozen_array(self.w, np.float64))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, WeightMatrix)
            and self.cities == other.cities
            and bool(np.array_equal(self.w, other.w))
        )

    @property
    def n(self) -> int:
        return len(self.cities)

    def weight(self, a: str, b: str) -> float:
        return float(self.w[self.cities.index(a), self.cities.index(b)])


@dataclass(frozen=True)
class MatrixDiagnostics:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class PeriodReport:
    """All indices for one period; ``gai`` is None when populations are missing."""

    period: Period
    cities: tuple[str, ...]
    iai: np.ndarray
    oai: np.ndarray
    siai: np.ndarray
    soai: np.ndarray
    gai: np.ndarray | None
    channel: tuple = ()
    convention: str = "canonical"


@dataclass(frozen=True)
class IndexReport:
    periods: tuple[PeriodReport, ...]

    def __getitem__(self, label: str) -> PeriodReport:
        for p in self.periods:
            if p.period.label == label:
                return p
        raise KeyError(label)


def build_matrix(
    records: Iterable[InteractionRecord],
    catalog: CityCatalog,
    period: Period,
    city_filter: Iterable[Tier | str] | None = DEFAULT_TIERS,
) -> AwarenessMatrix:
    """Sum records falling inside ``period`` into a catalog-ordered matrix.

    Records outside the period are skipped; a record straddling the period
    boundary raises :class:`PeriodError`. Records repeating an already seen
    (toponym, location, period) key are summed and counted in
    ``duplicate_count``.
    """
    cities = catalog.filter(city_filter).ids
    pos = {c: k for k, c in enumerate(cities)}
    cells = np.zeros((len(cities), len(cities)), dtype=np.int64)
    seen = set()
    duplicates = 0
    for rec in records:
        for cid in (rec.toponym_city, rec.location_city):
            if cid not in catalog:
                raise CityResolutionError(f"unknown city id {cid!r}")
        if not period.overlaps(rec.period):
            continue
        if not period.contains(rec.period):
            raise PeriodError(
                f"record period {rec.period.label} straddles query period {period.label}"
            )
        i = pos.get(rec.location_city)
        j = pos.get(rec.toponym_city)
        if i is None or j is None:
            continue
        key = (rec.toponym_city, rec.location_city, rec.period)
        if key in seen:
            duplicates += 1
        else:
            seen.add(key)
        cells[i, j] += rec.count
    if duplicates:
        log.warning("%d duplicate records summed for period %s", duplicates, period.label)
    return AwarenessMatrix(period, cities, cells, duplicate_count=duplicates)


def validate_matrix(m: AwarenessMatrix) -> MatrixDiagnostics:
    """Structural diagnostics. Never raises."""
    cells = np.asarray(m.cells)
    problems = []
    if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
        problems.append(f"nonsquare matrix: shape {cells.shape}")
        return MatrixDiagnostics(tuple(problems))
    if cells.shape[0] != len(m.cities):
        problems.append(
            f"dimension mismatch: {cells.shape[0]} rows for {len(m.cities)} cities"
        )
        return MatrixDiagnostics(tuple(problems))
    if not np.all(np.isfinite(cells)):
        problems.append("non-finite count")
    if np.any(cells < 0):
        problems.append("negative count")
    for k, cid in enumerate(m.cities):
        if not cells[k, k] > 0:
            problems.append(f"zero local-awareness: {cid}")
    return MatrixDiagnostics(tuple(problems))


def require_valid(m: AwarenessMatrix) -> None:
    """Raise :class:`ValidationError` listing every violation of ``m``."""
    diag = validate_matrix(m)
    if not diag.ok:
        raise ValidationError("; ".join(diag.violations))


def matrix_to_records(m: AwarenessMatrix) -> list[InteractionRecord]:
    """Export an integer matrix as one record per nonzero cell."""
    if not np.issubdtype(m.cells.dtype, np.integer):
        raise ValidationError("only integer count matrices can be exported as records")
    out = []
    for i, loc in enumerate(m.cities):
        for j, top in enumerate(m.cities):
            c = int(m.cells[i, j])
            if c:
                out.append(InteractionRecord(top, loc, c, m.period))
    return out
