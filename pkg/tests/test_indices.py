import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cityaware.errors import ValidationError
from cityaware.indices import awareness_index, gai_reference, spatial_awareness_index
from cityaware.model import AwarenessMatrix, Period, WeightMatrix

import oracles
from conftest import C3, W3, random_instance

P = Period.year(2010)


def matrix(cells, cities=None):
    cities = cities or tuple(f"c{k}" for k in range(len(cells)))
    return AwarenessMatrix(P, cities, np.array(cells))


def ones_weights(cities):
    n = len(cities)
    return WeightMatrix(cities, np.ones((n, n)) - np.eye(n))


def test_hand_computed_awareness(m3):
    np.testing.assert_allclose(awareness_index(m3, "in").values, [0.35, 0.175, 1.0], atol=1e-12)
    np.testing.assert_allclose(awareness_index(m3, "out").values, [0.30, 0.35, 0.40], atol=1e-12)
    literal = awareness_index(m3, "in", "paper_literal")
    assert literal["a"] == pytest.approx(20 / 200 + 10 / 50, abs=1e-12)
    assert literal["a"] == pytest.approx(0.30, abs=1e-12)
    assert literal.convention == "paper_literal"


def test_hand_computed_spatial(m3, w3):
    siai = spatial_awareness_index(m3, w3, "in")
    soai = spatial_awareness_index(m3, w3, "out")
    np.testing.assert_allclose(siai.values, [0.325, 0.16, 0.74], atol=1e-12)
    assert soai["a"] == pytest.approx(0.25, abs=1e-12)
    assert soai["c"] == pytest.approx(0.29, abs=1e-12)
    assert soai["b"] == pytest.approx((30 * 1 + 40 * 0.8) / 200, abs=1e-12)


def test_diagonal_only_is_zero(w3):
    m = matrix(np.diag([4, 5, 6]), ("a", "b", "c"))
    for direction in ("in", "out"):
        assert not awareness_index(m, direction).values.any()
        assert not spatial_awareness_index(m, w3, direction).values.any()


@pytest.mark.parametrize("convention", ["canonical", "paper_literal"])
def test_uniform_matrix(convention):
    n = 5
    m = matrix(np.full((n, n), 7))
    np.testing.assert_allclose(awareness_index(m, "in", convention).values, n - 1)
    np.testing.assert_allclose(awareness_index(m, "out").values, n - 1)


def test_zero_diagonal_names_city():
    m = matrix([[1, 2], [3, 0]], ("x", "y"))
    with pytest.raises(ValidationError, match="zero local-awareness: y"):
        awareness_index(m)


def test_weight_dimension_mismatch(m3):
    with pytest.raises(ValidationError):
        spatial_awareness_index(m3, ones_weights(("a", "b")))


def test_gai():
    m = matrix([[1, 0], [50, 1]], ("a", "b"))
    g = [[0.0, 0.1], [0.1, 0.0]]
    assert gai_reference(m, g, [10.0, 1.0])["a"] == pytest.approx(0.5, abs=1e-12)
    assert not gai_reference(matrix(np.diag([3, 4])), g, [1.0, 1.0]).values.any()
    with pytest.raises(ValidationError, match="population"):
        gai_reference(m, g, [10.0, None])


def test_gai_against_oracle(m3):
    g = [[0.0, 0.12, 0.3], [0.12, 0.0, 0.05], [0.3, 0.05, 0.0]]
    pop = [1000.0, 250.0, 80.0]
    np.testing.assert_allclose(gai_reference(m3, g, pop).values, oracles.gai(C3, g, pop), rtol=1e-14)


@pytest.mark.parametrize("seed", range(20))
def test_random_instances_match_oracle(seed):
    rng = np.random.default_rng(seed)
    c, w = random_instance(rng, int(rng.integers(2, 9)))
    m, wm = matrix(c), WeightMatrix(tuple(f"c{k}" for k in range(len(c))), w)
    cl, wl = c.tolist(), w.tolist()
    np.testing.assert_allclose(awareness_index(m, "in").values, oracles.iai(cl), rtol=1e-12)
    np.testing.assert_allclose(awareness_index(m, "in", "paper_literal").values,
                               oracles.iai_literal(cl), rtol=1e-12)
    np.testing.assert_allclose(awareness_index(m, "out").values, oracles.oai(cl), rtol=1e-12)
    np.testing.assert_allclose(spatial_awareness_index(m, wm, "in").values, oracles.siai(cl, wl), rtol=1e-12)
    np.testing.assert_allclose(spatial_awareness_index(m, wm, "out").values, oracles.soai(cl, wl), rtol=1e-12)


positive_matrix = st.integers(2, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(1, 10_000), min_size=n, max_size=n), min_size=n, max_size=n)
)


@settings(max_examples=80, deadline=None)
@given(positive_matrix, st.integers(2, 50))
def test_scale_invariance(cells, k):
    m = matrix(cells)
    mk = matrix(np.array(cells) * k)
    w = ones_weights(m.cities)
    for f in (lambda x: awareness_index(x, "in"), lambda x: awareness_index(x, "out"),
              lambda x: spatial_awareness_index(x, w, "in"), lambda x: spatial_awareness_index(x, w, "out")):
        np.testing.assert_allclose(f(mk).values, f(m).values, rtol=1e-12)
    g = np.ones((m.n, m.n)) * 0.2
    pops = [3.0] * m.n
    np.testing.assert_allclose(gai_reference(mk, g, pops).values, k * gai_reference(m, g, pops).values, rtol=1e-12)


@settings(max_examples=80, deadline=None)
@given(positive_matrix, st.data())
def test_monotonicity(cells, data):
    m = matrix(cells)
    n = m.n
    i = data.draw(st.integers(0, n - 1))
    j = data.draw(st.integers(0, n - 1).filter(lambda x: x != i))
    bumped = np.array(cells)
    bumped[j, i] += data.draw(st.integers(1, 1000))
    mb = matrix(bumped)
    w = ones_weights(m.cities)
    assert awareness_index(mb, "in").values[i] > awareness_index(m, "in").values[i]
    assert spatial_awareness_index(mb, w, "in").values[i] > spatial_awareness_index(m, w, "in").values[i]
    assert awareness_index(mb, "out").values[i] == awareness_index(m, "out").values[i]


@settings(max_examples=80, deadline=None)
@given(positive_matrix)
def test_unit_weight_reduction(cells):
    m = matrix(cells)
    w = ones_weights(m.cities)
    np.testing.assert_allclose(spatial_awareness_index(m, w, "in").values,
                               awareness_index(m, "in").values, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(spatial_awareness_index(m, w, "out").values,
                               awareness_index(m, "out").values, rtol=1e-12, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(positive_matrix, st.randoms(use_true_random=False))
def test_permutation_equivariance(cells, rnd):
    m = matrix(cells)
    order = list(m.cities)
    rnd.shuffle(order)
    pm = m.permuted(order)
    for direction in ("in", "out"):
        base = awareness_index(m, direction).as_dict()
        perm = awareness_index(pm, direction).as_dict()
        assert perm.keys() == base.keys()
        for c in base:
            assert perm[c] == pytest.approx(base[c], rel=1e-12)
