"""CSV readers/writers for catalogs, records and search fetch plans.

All files are UTF-8, comma-delimited, with a header row. In the catalog's
``aliases`` column, names are separated by ``;`` and a leading ``*`` marks
the alias used as the platform search term, e.g. ``*深圳;Shenzhen City``.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence, Union
from urllib.parse import quote

from .errors import CatalogError, CityResolutionError, ParseError, PeriodError, ValidationError
from .model import (
    DEFAULT_TIERS,
    CityCatalog,
    CityEntry,
    InteractionRecord,
    Period,
    Tier,
)

__all__ = [
    "CATALOG_COLUMNS",
    "RECORD_COLUMNS",
    "FETCHPLAN_COLUMNS",
    "SEARCH_BASE_URL",
    "FetchPlanEntry",
    "parse_catalog",
    "parse_records",
    "resolve_city",
    "load_catalog",
    "load_records",
    "serialize_catalog",
    "serialize_records",
    "build_fetch_plan",
    "search_url",
    "serialize_fetch_plan",
    "parse_fetch_plan",
    "format_number",
]

CATALOG_COLUMNS = (
    "id", "name", "aliases", "lat", "lon",
    "population", "gdp", "tier", "region_code", "chainage_km",
)
RECORD_COLUMNS = ("toponym", "location", "count", "period_start", "period_end")
FETCHPLAN_COLUMNS = ("toponym", "location", "period_start", "period_end", "url")
SEARCH_BASE_URL = "https://s.weibo.com/weibo/?q="
QUERY_MARK = "*"

Source = Union[bytes, str]


@dataclass(frozen=True)
class FetchPlanEntry:
    toponym_city: str
    location_city: str
    period: Period
    url: str


def _text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8-sig")
    return source[1:] if source.startswith("﻿") else source


def _rows(source: Source, required: Sequence[str]):
    """Yield ``(line_number, row_dict)``; the header is line 1."""
    reader = csv.reader(io.StringIO(_text(source), newline=""))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("missing header row", line=1) from None
    missing = [c for c in required if c not in header]
    if missing:
        raise ParseError(f"missing column(s) {', '.join(missing)}", line=1)
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) > len(header):
            raise ParseError(f"{len(row)} fields for {len(header)} columns", line=reader.line_num)
        row = row + [""] * (len(header) - len(row))
        yield reader.line_num, dict(zip(header, row))


def _float(value: str, name: str, line: int, required: bool = False) -> float | None:
    value = value.strip()
    if not value:
        if required:
            raise ParseError(f"missing {name}", line=line)
        return None
    try:
        out = float(value)
    except ValueError:
        raise ParseError(f"malformed {name} {value!r}", line=line) from None
    if not math.isfinite(out):
        raise ParseError(f"non-finite {name} {value!r}", line=line)
    return out


def parse_catalog(source: Source) -> CityCatalog:
    entries = []
    for line, row in _rows(source, CATALOG_COLUMNS[:5] + ("tier",)):
        cid = row["id"].strip()
        aliases = []
        query = None
        for raw in row["aliases"].split(";"):
            name = raw.strip()
            if name.startswith(QUERY_MARK):
                name = name[len(QUERY_MARK):].strip()
                if query is None:
                    query = name
            if name:
                aliases.append(name)
        tier_text = row["tier"].strip()
        try:
            tier = Tier(tier_text)
        except ValueError:
            raise CatalogError(f"tier {tier_text!r} not in FC/SC/TC/MC", line=line) from None
        try:
            entries.append(
                CityEntry(
                    id=cid,
                    canonical_name=row["name"].strip(),
                    aliases=tuple(aliases),
                    lat=_float(row["lat"], "lat", line, required=True),
                    lon=_float(row["lon"], "lon", line, required=True),
                    population=_float(row.get("population", ""), "population", line),
                    gdp=_float(row.get("gdp", ""), "gdp", line),
                    tier=tier,
                    region_code=row.get("region_code", "").strip() or None,
                    chainage_km=_float(row.get("chainage_km", ""), "chainage_km", line),
                    query_alias=query,
                )
            )
        except CatalogError as exc:
            if exc.line is not None:
                raise
            raise CatalogError(str(exc), line=line) from None
    return CityCatalog(entries)


def resolve_city(name: str, catalog: CityCatalog) -> str:
    """Exact id / canonical name / alias lookup after trimming whitespace."""
    return catalog.resolve(name)


def _date(value: str, name: str, line: int) -> date:
    try:
        return date.fromisoformat(value.strip())
    except ValueError:
        raise ParseError(f"malformed {name} {value.strip()!r}", line=line) from None


def _period(row: dict, line: int) -> Period:
    start = _date(row["period_start"], "period_start", line)
    end = _date(row["period_end"], "period_end", line)
    try:
        return Period(start, end)
    except PeriodError as exc:
        raise ParseError(str(exc), line=line) from None


def parse_records(source: Source, catalog: CityCatalog) -> list[InteractionRecord]:
    records = []
    for line, row in _rows(source, RECORD_COLUMNS):
        try:
            toponym = catalog.resolve(row["toponym"])
            location = catalog.resolve(row["location"])
        except CityResolutionError as exc:
            raise CityResolutionError(str(exc), line=line) from None
        text = row["count"].strip()
        try:
            count = int(text)
        except ValueError:
            raise ParseError(f"malformed count {text!r}", line=line) from None
        if count < 0:
            raise ParseError("negative count", line=line)
        records.append(InteractionRecord(toponym, location, count, _period(row, line)))
    return records


def load_catalog(path: str | os.PathLike) -> CityCatalog:
    return parse_catalog(Path(path).read_bytes())


def load_records(path: str | os.PathLike, catalog: CityCatalog) -> list[InteractionRecord]:
    return parse_records(Path(path).read_bytes(), catalog)


def format_number(value: float | None) -> str:
    """Shortest round-tripping text; integral values drop the ``.0``."""
    if value is None:
        return ""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _write(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def serialize_catalog(catalog: CityCatalog) -> str:
    rows = []
    for e in catalog:
        aliases = ";".join(
            (QUERY_MARK + a) if a == e.query_alias else a for a in e.aliases
        )
        rows.append([
            e.id, e.canonical_name, aliases,
            format_number(e.lat), format_number(e.lon),
            format_number(e.population), format_number(e.gdp),
            e.tier.value, e.region_code or "", format_number(e.chainage_km),
        ])
    return _write(CATALOG_COLUMNS, rows)


def serialize_records(records: Iterable[InteractionRecord]) -> str:
    return _write(
        RECORD_COLUMNS,
        (
            [r.toponym_city, r.location_city, str(r.count),
             r.period.start.isoformat(), r.period.end.isoformat()]
            for r in records
        ),
    )


def search_url(toponym: CityEntry, location: CityEntry, period: Period, encode: bool = True) -> str:
    """Platform search URL counting posts in ``location`` that mention ``toponym``."""
    if not location.region_code:
        raise ValidationError(f"missing region_code for location city {location.id}")
    term = quote(toponym.query_term, safe="") if encode else toponym.query_term
    return (
        f"{SEARCH_BASE_URL}{term}"
        f"&region=custom:{location.region_code}"
        f"&typeall=1"
        f"&timescope=custom:{period.start.isoformat()}-0:{period.end.isoformat()}-23"
    )


def build_fetch_plan(
    catalog: CityCatalog,
    periods: Sequence[Period],
    pairs: Sequence[tuple[str, str]] | None = None,
    city_filter=DEFAULT_TIERS,
) -> list[FetchPlanEntry]:
    """One search per (toponym, location, period).

    ``pairs`` are ``(toponym, location)`` ids; the default is every ordered
    pair of the filtered catalog including self-pairs. Ordering is period,
    then location, then toponym.
    """
    if pairs is None:
        ids = catalog.filter(city_filter).ids
        pairs = [(t, loc) for loc in ids for t in ids]
    for _, loc in pairs:
        if not catalog[loc].region_code:
            raise ValidationError(f"missing region_code for location city {loc}")
    plan = []
    for period in periods:
        for t, loc in pairs:
            plan.append(FetchPlanEntry(t, loc, period, search_url(catalog[t], catalog[loc], period)))
    return plan


def serialize_fetch_plan(plan: Iterable[FetchPlanEntry]) -> str:
    return _write(
        FETCHPLAN_COLUMNS,
        (
            [e.toponym_city, e.location_city, e.period.start.isoformat(),
             e.period.end.isoformat(), e.url]
            for e in plan
        ),
    )


def parse_fetch_plan(source: Source, catalog: CityCatalog) -> list[FetchPlanEntry]:
    out = []
    for line, row in _rows(source, FETCHPLAN_COLUMNS):
        try:
            t = catalog.resolve(row["toponym"])
            loc = catalog.resolve(row["location"])
        except CityResolutionError as exc:
            raise CityResolutionError(str(exc), line=line) from None
        out.append(FetchPlanEntry(t, loc, _period(row, line), row["url"]))
    return out
