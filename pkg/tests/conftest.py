from pathlib import Path

import numpy as np
import pytest

from cityaware.ingest import load_catalog
from cityaware.model import AwarenessMatrix, CityCatalog, CityEntry, Period, Tier, WeightMatrix

DATA = Path(__file__).resolve().parent.parent / "data"
CATALOG_CSV = DATA / "beijing_shenzhen_cities.csv"

# Hand-computed 3-city instance used across modules.
C3 = [[100, 20, 10], [30, 200, 40], [5, 15, 50]]
W3 = [[0.0, 1.0, 0.5], [1.0, 0.0, 0.8], [0.5, 0.8, 0.0]]
GDP3 = (100.0, 80.0, 50.0)


@pytest.fixture
def m3():
    return AwarenessMatrix(Period.year(2010), ("a", "b", "c"), np.array(C3))


@pytest.fixture
def w3():
    return WeightMatrix(("a", "b", "c"), np.array(W3))


@pytest.fixture
def catalog3():
    return CityCatalog([
        CityEntry("a", "Alpha", 30.0, 114.0, Tier.FC, population=10.0, gdp=GDP3[0]),
        CityEntry("b", "Beta", 31.0, 114.0, Tier.SC, population=20.0, gdp=GDP3[1]),
        CityEntry("c", "Gamma", 32.0, 114.0, Tier.TC, population=40.0, gdp=GDP3[2]),
    ])


@pytest.fixture(scope="session")
def line_catalog():
    return load_catalog(CATALOG_CSV)


def random_instance(rng, n, low=1, high=1000):
    """Positive integer matrix and random symmetric positive weights."""
    c = rng.integers(low, high, size=(n, n))
    w = rng.uniform(0.05, 1.0, size=(n, n))
    w = (w + w.T) / 2
    np.fill_diagonal(w, 0.0)
    w = w / w.max()
    return c, w
