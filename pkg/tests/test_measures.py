import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from krselect.errors import (
    DimensionMismatch,
    DuplicatePoint,
    EmptySample,
    InvalidTargetIndex,
    MalformedHeader,
    MassMismatch,
    SupportMismatch,
    ZeroMass,
)
from krselect.measures import (
    AtomicMeasure,
    PointSet,
    align,
    empirical_from_sample,
    normalize,
    project_coords,
    pushforward,
    read_measure_csv,
    tv_by_enumeration,
    tv_distance,
    write_measure_csv,
)

from conftest import measure_pair, rand_probs

PS3 = PointSet.from_values([0.0, 1.0, 2.0])


def test_pointset_rejects_duplicates_and_ragged():
    with pytest.raises(DuplicatePoint):
        PointSet.from_values([1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        PointSet(((0.0,), (1.0, 2.0)))


@pytest.mark.parametrize(
    "w, expected",
    [((2.0, 2.0), (0.5, 0.5)), ((1.0, 0.0, 0.0), (1.0, 0.0, 0.0))],
)
def test_normalize(w, expected):
    m = AtomicMeasure(PointSet.from_values(range(len(w))), np.array(w))
    assert np.allclose(normalize(m).weights, expected)
    assert normalize(m).total_mass == pytest.approx(1.0, abs=1e-15)


def test_normalize_zero_mass():
    with pytest.raises(ZeroMass):
        normalize(AtomicMeasure(PointSet.from_values([0, 1]), np.zeros(2)))


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        AtomicMeasure(PS3, np.array([0.5, -0.1, 0.6]))


def test_tv_examples():
    a = AtomicMeasure(PS3, np.array([0.5, 0.5, 0.0]))
    b = AtomicMeasure(PS3, np.array([0.0, 0.5, 0.5]))
    assert tv_distance(a, a) == 0.0
    assert tv_distance(a, b) == pytest.approx(0.5)
    d0 = AtomicMeasure(PS3, np.array([1.0, 0, 0]))
    d1 = AtomicMeasure(PS3, np.array([0, 1.0, 0]))
    assert tv_distance(d0, d1) == pytest.approx(1.0)


def test_tv_errors():
    a = AtomicMeasure(PS3, np.array([0.5, 0.5, 0.0]))
    with pytest.raises(MassMismatch):
        tv_distance(a, AtomicMeasure(PS3, np.array([0.2, 0.2, 0.2])))
    with pytest.raises(SupportMismatch):
        tv_distance(a, AtomicMeasure(PointSet.from_values([5, 6]), np.array([0.5, 0.5])))


@given(measure_pair(max_n=10))
def test_tv_equals_subset_supremum(pair):
    a, b = pair
    assert tv_distance(a, b) == pytest.approx(tv_by_enumeration(a, b), abs=1e-12)
    assert 0.0 <= tv_distance(a, b) <= 1.0 + 1e-12


def test_tv_is_metric(rng):
    for _ in range(200):
        n = int(rng.integers(1, 9))
        ps = PointSet.from_values(range(n))
        a, b, c = (AtomicMeasure(ps, rand_probs(rng, n)) for _ in range(3))
        assert tv_distance(a, b) == pytest.approx(tv_distance(b, a), abs=1e-15)
        assert tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12
        assert tv_distance(a, a) <= 1e-12


def test_pushforward_examples():
    m = AtomicMeasure(PS3, np.array([0.2, 0.3, 0.5]))
    target = PointSet.from_values([10.0, 20.0])
    assert np.allclose(pushforward(m, [0, 0, 1], target).weights, [0.5, 0.5])
    assert np.array_equal(pushforward(m, [0, 1, 2], PS3).weights, m.weights)
    collapsed = pushforward(m, [1, 1, 1], target)
    assert collapsed.weights[1] == pytest.approx(1.0) and collapsed.weights[0] == 0.0
    with pytest.raises(InvalidTargetIndex):
        pushforward(m, [0, 1, 2], target)


@given(st.lists(st.floats(0, 5, allow_nan=False), min_size=1, max_size=12), st.data())
def test_pushforward_preserves_mass(w, data):
    ps = PointSet.from_values(range(len(w)))
    m = AtomicMeasure(ps, np.array(w))
    k = data.draw(st.integers(1, len(w)))
    mapping = data.draw(st.lists(st.integers(0, k - 1), min_size=len(w), max_size=len(w)))
    out = pushforward(m, mapping, PointSet.from_values(range(k)))
    assert out.total_mass == pytest.approx(m.total_mass, rel=1e-14, abs=1e-14)


def test_empirical_examples():
    ps, m = empirical_from_sample([[0.0], [1.0]], 0.5)
    assert np.allclose(m.weights, [0.25, 0.25])
    ps, m = empirical_from_sample([[0.0], [1.0], [0.0], [2.0]], 1.0)
    assert len(ps) == 3
    assert np.allclose(m.weights, [0.5, 0.25, 0.25])
    with pytest.raises(EmptySample):
        empirical_from_sample([], 1.0)


def test_align_and_projection():
    a = AtomicMeasure(PointSet.from_values([0.0, 1.0]), np.array([0.5, 0.5]))
    b = AtomicMeasure(PointSet.from_values([1.0, 3.0]), np.array([0.25, 0.75]))
    a2, b2 = align(a, b)
    assert a2.support == b2.support
    assert a2.support.points == ((0.0,), (1.0,), (3.0,))
    assert np.allclose(b2.weights, [0, 0.25, 0.75])
    m = AtomicMeasure(PointSet(((0.0, 1.0), (0.0, 2.0), (1.0, 1.0))), np.array([0.2, 0.3, 0.5]))
    p = project_coords(m, [0])
    assert p.support.points == ((0.0,), (1.0,))
    assert np.allclose(p.weights, [0.5, 0.5])


def test_csv_roundtrip(tmp_path):
    m = AtomicMeasure(PointSet(((0.1, 2.0), (3.5, -1.0))), np.array([0.3, 0.7]))
    path = tmp_path / "m.csv"
    write_measure_csv(m, path)
    back = read_measure_csv(path)
    assert back.support == m.support
    assert np.array_equal(back.weights, m.weights)


def test_csv_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("w,x\n1,0\n")
    with pytest.raises(MalformedHeader):
        read_measure_csv(p)
