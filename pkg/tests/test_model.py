import random
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cityaware.errors import CatalogError, CityResolutionError, PeriodError
from cityaware.model import (
    AwarenessMatrix,
    CityCatalog,
    CityEntry,
    InteractionRecord,
    Period,
    Tier,
    build_matrix,
    matrix_to_records,
    validate_matrix,
)

JAN10 = Period.month(2010, 1)


@pytest.fixture
def cat():
    return CityCatalog([
        CityEntry("beijing", "Beijing", 39.9042, 116.4074, Tier.FC, aliases=("北京",)),
        CityEntry("wuhan", "Wuhan", 30.5928, 114.3055, Tier.SC, aliases=("武汉",)),
        CityEntry("xianning", "Xianning", 29.8413, 114.3225, Tier.TC),
        CityEntry("chibi", "Chibi", 29.72, 113.88, Tier.MC),
    ])


def test_corridor_catalog_rows(cat):
    recs = [
        InteractionRecord("beijing", "beijing", 29899, JAN10),
        InteractionRecord("beijing", "wuhan", 535, JAN10),
    ]
    m = build_matrix(recs, cat, JAN10)
    assert m.cities == ("beijing", "wuhan", "xianning")
    assert m.value("beijing", "beijing") == 29899
    # location = Wuhan, toponym = Beijing
    assert m.value("wuhan", "beijing") == 535
    assert m.value("beijing", "wuhan") == 0


def test_empty_records_give_zero_matrix(cat):
    m = build_matrix([], cat, JAN10)
    assert m.cells.shape == (3, 3)
    assert not m.cells.any()


def test_duplicates_summed_with_warning(cat):
    recs = [
        InteractionRecord("wuhan", "beijing", 2, JAN10),
        InteractionRecord("wuhan", "beijing", 3, JAN10),
    ]
    m = build_matrix(recs, cat, JAN10)
    assert m.value("beijing", "wuhan") == 5
    assert m.duplicate_count == 1


def test_mc_cities_dropped_by_default(cat):
    recs = [InteractionRecord("chibi", "wuhan", 7, JAN10)]
    assert build_matrix(recs, cat, JAN10).n == 3
    full = build_matrix(recs, cat, JAN10, city_filter=None)
    assert full.cities[-1] == "chibi"
    assert full.value("wuhan", "chibi") == 7


def test_unknown_city_rejected(cat):
    with pytest.raises(CityResolutionError):
        build_matrix([InteractionRecord("atlantis", "wuhan", 1, JAN10)], cat, JAN10)


def test_out_of_period_records_skipped_and_straddling_rejected(cat):
    feb = Period.month(2010, 2)
    assert build_matrix([InteractionRecord("wuhan", "wuhan", 9, feb)], cat, JAN10).cells.sum() == 0
    q1 = Period(date(2010, 1, 1), date(2010, 3, 31))
    straddle = InteractionRecord("wuhan", "wuhan", 9, Period(date(2010, 3, 1), date(2010, 4, 30)))
    with pytest.raises(PeriodError):
        build_matrix([straddle], cat, q1)


def test_year_period_sums_months(cat):
    recs = [InteractionRecord("wuhan", "wuhan", k, Period.month(2010, k)) for k in range(1, 13)]
    m = build_matrix(recs, cat, Period.year(2010))
    assert m.value("wuhan", "wuhan") == sum(range(1, 13))
    assert m.duplicate_count == 0


@pytest.mark.parametrize(
    "cells, expected",
    [
        ([[1, 2, 3], [4, 5, 6], [7, 8, 9]], ()),
        ([[1, 2, 3], [4, 0, 6], [7, 8, 9]], ("zero local-awareness: b",)),
        ([[1, -2, 3], [4, 5, 6], [7, 8, 9]], ("negative count",)),
    ],
)
def test_validate_matrix(cells, expected):
    m = AwarenessMatrix(JAN10, ("a", "b", "c"), np.array(cells))
    assert validate_matrix(m).violations == expected


def test_validate_nonsquare_never_raises():
    m = AwarenessMatrix(JAN10, ("a", "b"), np.ones((2, 3), dtype=int))
    diag = validate_matrix(m)
    assert not diag.ok
    assert diag.violations[0].startswith("nonsquare")


def test_matrix_is_read_only(cat):
    m = build_matrix([], cat, JAN10)
    with pytest.raises(ValueError):
        m.cells[0, 0] = 1


def test_catalog_rejects_ambiguous_alias():
    with pytest.raises(CatalogError, match="suzhou_js.*suzhou_ah|suzhou_ah.*suzhou_js"):
        CityCatalog([
            CityEntry("suzhou_js", "Suzhou (Jiangsu)", 31.3, 120.6, Tier.TC, aliases=("Suzhou",)),
            CityEntry("suzhou_ah", "Suzhou (Anhui)", 33.6, 116.9, Tier.TC, aliases=("Suzhou",)),
        ])


def test_period_helpers():
    assert Period.parse("2010-02") == Period(date(2010, 2, 1), date(2010, 2, 28))
    assert Period.parse("2012") == Period(date(2012, 1, 1), date(2012, 12, 31))
    assert Period.parse("2012").label == "2012"
    assert len(Period.year(2011).months()) == 12
    with pytest.raises(PeriodError):
        Period(date(2010, 2, 1), date(2010, 1, 1))
    with pytest.raises(PeriodError):
        Period.parse("Jan 2010")


counts = st.lists(
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 500), st.integers(1, 3)),
    max_size=40,
)


@settings(max_examples=60, deadline=None)
@given(counts)
def test_build_invariants(rows):
    cat = CityCatalog([
        CityEntry(f"c{k}", f"City {k}", 30.0 + k, 114.0, Tier.TC) for k in range(3)
    ])
    q1 = Period(date(2010, 1, 1), date(2010, 2, 28))
    recs = [InteractionRecord(f"c{t}", f"c{loc}", n, Period.month(2010, mo)) for t, loc, n, mo in rows]
    m = build_matrix(recs, cat, q1)
    # permutation invariance
    shuffled = recs[:]
    random.Random(0).shuffle(shuffled)
    assert build_matrix(shuffled, cat, q1) == m
    # mass conservation over in-period records
    assert m.cells.sum() == sum(r.count for r in recs if r.period.start.month <= 2)
    # export/rebuild round trip on a matrix of a single period
    jan = build_matrix(recs, cat, JAN10)
    assert build_matrix(matrix_to_records(jan), cat, JAN10) == jan
