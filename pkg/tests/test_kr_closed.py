import itertools

import numpy as np
import pytest
from hypothesis import given

from krselect.errors import MethodMismatch
from krselect.kr_closed import (
    CutProfile,
    circle_cut_constant,
    circle_value_at,
    cut_profile,
    w1,
    w1_auto,
    w1_circle,
    w1_discrete,
    w1_line,
    w1_product_additive,
)
from krselect.kr_exact import w1_exact
from krselect.measures import AtomicMeasure, PointSet, tv_distance
from krselect.metrics import Circle, Discrete, Explicit, Line, Product

from conftest import measure_pair, rand_probs
from oracles import brute_cdf_area


def _m(values, w):
    return AtomicMeasure(PointSet.from_values(values), np.array(w, dtype=float))


def test_discrete_examples():
    a, b = _m([0, 1, 2], [0.5, 0.5, 0]), _m([0, 1, 2], [0, 0.5, 0.5])
    assert w1_discrete(a, b, 1.0) == pytest.approx(0.5)
    assert w1_discrete(a, b, 3.0) == pytest.approx(1.5)
    assert w1_discrete(a, a) == 0.0
    assert w1_exact(a, b, Discrete(1.0)).cost == pytest.approx(0.5)


def test_line_examples():
    assert w1_line(_m([0, 1, 3], [0.5, 0.5, 0]), _m([0, 1, 3], [0, 0, 1])) == pytest.approx(2.5)
    assert w1_line(_m([0, 1], [1, 0]), _m([0, 1], [0, 1])) == 1.0
    a = _m([2, -1, 5], [0.2, 0.3, 0.5])
    assert w1_line(a, a) == 0.0


def test_line_unsorted_support():
    a, b = _m([3, 0, 1], [0, 0.5, 0.5]), _m([3, 0, 1], [1, 0, 0])
    assert w1_line(a, b) == pytest.approx(2.5)


@given(measure_pair(max_n=12))
def test_line_matches_brute_area(pair):
    a, b = pair
    x = a.support.coords[:, 0]
    assert w1_line(a, b) == pytest.approx(brute_cdf_area(x, a.weights, b.weights), abs=1e-12)


def test_circle_examples():
    vals = [0, 0.25, 0.5, 0.75]
    a, b = _m(vals, [1, 0, 0, 0]), _m(vals, [0, 0, 0, 1])
    assert w1_circle(a, b, 1.0) == pytest.approx(0.25)
    prof = cut_profile(a, b, 1.0)
    assert np.allclose(prof.alpha, [1, 1, 1, 0])
    assert circle_cut_constant(prof) == 1.0
    assert w1_circle(_m([0, 0.5], [1, 0]), _m([0, 0.5], [0, 1]), 1.0) == pytest.approx(0.5)
    assert w1_circle(a, a, 1.0) == 0.0


def test_cut_constant_examples():
    prof = CutProfile(np.array([0.0, 0.3]), np.array([1.0, 0.0]), np.array([0.3, 0.7]), 1.0)
    assert circle_cut_constant(prof) == 0.0
    const = CutProfile(np.array([0.0, 0.5]), np.array([0.4, 0.4]), np.array([0.5, 0.5]), 1.0)
    assert circle_cut_constant(const) == 0.4


def test_cut_profile_invariants(rng):
    for _ in range(50):
        n = int(rng.integers(1, 20))
        vals = np.unique(rng.uniform(-3, 3, n))
        a = AtomicMeasure(PointSet.from_values(vals), rand_probs(rng, len(vals)))
        b = AtomicMeasure(PointSet.from_values(vals), rand_probs(rng, len(vals)))
        prof = cut_profile(a, b, 2.0)
        assert abs(prof.alpha[-1]) <= 1e-9
        assert prof.lengths.sum() == pytest.approx(2.0, abs=1e-9)
        assert np.all(np.diff(prof.positions) > 0)
        assert circle_value_at(prof, circle_cut_constant(prof)) == pytest.approx(w1_circle(a, b, 2.0), abs=1e-9)


def test_circle_wraparound_coordinates():
    # 1.25 and 0.25 coincide on a unit circle
    a, b = _m([0.0, 1.25], [1, 0]), _m([0.0, 1.25], [0, 1])
    assert w1_circle(a, b, 1.0) == pytest.approx(0.25)
    c, d = _m([0.0, 0.25, 1.25], [0.5, 0.5, 0]), _m([0.0, 0.25, 1.25], [0, 0, 1])
    assert w1_circle(c, d, 1.0) == pytest.approx(0.125)


def test_product_additive_example_and_dispatch():
    a, b = _m([0, 1, 2], [0.5, 0.5, 0]), _m([0, 1, 2], [0, 0.5, 0.5])
    c, d = _m([0, 1, 3], [0.5, 0.5, 0]), _m([0, 1, 3], [0, 0, 1])
    assert w1_product_additive([(a, b, Discrete(1.0)), (c, d, Line())]) == pytest.approx(3.0)
    assert w1_product_additive([(c, d, Line())]) == pytest.approx(2.5)
    assert w1_product_additive([(a, a, Line()), (c, c, Line())]) == 0.0
    # joint product measure under l1 agrees with the sum
    pts = list(itertools.product([0, 1, 2], [0, 1, 3]))
    P1 = AtomicMeasure(PointSet(tuple((float(x), float(y)) for x, y in pts)), np.outer(a.weights, c.weights).ravel())
    P2 = AtomicMeasure(P1.support, np.outer(b.weights, d.weights).ravel())
    d2 = Product((Discrete(1.0), Line()))
    assert w1_exact(P1, P2, d2).cost == pytest.approx(3.0, abs=1e-9)
    assert w1_auto(P1, P2, d2, product_measures=True) == pytest.approx(3.0, abs=1e-9)
    assert w1(P1, P2, d2, "product") == pytest.approx(3.0, abs=1e-9)


def test_auto_dispatch_paths():
    a, b = _m([0, 1, 2], [0.5, 0.5, 0]), _m([0, 1, 2], [0, 0.5, 0.5])
    assert w1_auto(a, b, Discrete(1.0)) == pytest.approx(0.5)
    E = Explicit(((0, 1, 2), (1, 0, 1), (2, 1, 0)))
    assert w1_auto(a, b, E) == w1_exact(a, b, E).cost


def test_linf_discrete_grid_equals_tv(rng):
    grid = PointSet(tuple(itertools.product([0.0, 1.0], [0.0, 1.0, 2.0])))
    for _ in range(20):
        a = AtomicMeasure(grid, rand_probs(rng, len(grid)))
        b = AtomicMeasure(grid, rand_probs(rng, len(grid)))
        d = Product((Discrete(1.0), Discrete(1.0)), "linf")
        assert w1_auto(a, b, d) == pytest.approx(tv_distance(a, b), abs=1e-12)


def test_method_guards():
    a, b = _m([0, 1], [1, 0]), _m([0, 1], [0, 1])
    with pytest.raises(MethodMismatch):
        w1(a, b, Circle(4.0), "line")
    with pytest.raises(MethodMismatch):
        w1(a, b, Line(), "tv")
    with pytest.raises(MethodMismatch):
        w1(a, b, Line(), "circle")
    with pytest.raises(MethodMismatch):
        w1(a, b, Line(), "bogus")
    assert w1(a, b, Line(), "lp") == 1.0
    assert w1(a, b, Circle(4.0), "circle") == 1.0
