import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import best_partition_wcss
from sansum.cluster import choose_elbow, distance, elbow_select, kmeans, lloyd
from sansum.errors import DegenerateVectorError, DimensionError, InsufficientDataError


def test_two_obvious_clusters():
    X = np.array([[0.0], [0.1], [10.0], [10.1]])
    model = kmeans(X, 2, seed=0)
    assert model.wcss == pytest.approx(best_partition_wcss(X, 2), abs=1e-12)
    assert model.wcss == pytest.approx(0.01, abs=1e-12)
    np.testing.assert_allclose(sorted(model.centroids[:, 0]), [0.05, 10.05], atol=1e-12)
    assert model.assignments[0] == model.assignments[1] != model.assignments[2] == model.assignments[3]


def test_k_equals_n():
    X = np.array([[0.0, 1.0], [2.0, 3.0], [5.0, -1.0]])
    model = kmeans(X, 3, seed=4)
    assert model.wcss == 0.0
    np.testing.assert_allclose(np.sort(model.centroids, axis=0), np.sort(X, axis=0))


def test_k_equals_n_with_duplicates():
    X = np.zeros((4, 2))
    model = kmeans(X, 4, seed=0)
    assert sorted(model.assignments.tolist()) == [0, 1, 2, 3]
    assert model.wcss == 0.0


def test_k_one():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(9, 3))
    model = kmeans(X, 1)
    np.testing.assert_allclose(model.centroids[0], X.mean(axis=0), atol=1e-12)
    assert model.wcss == pytest.approx(float(((X - X.mean(axis=0)) ** 2).sum()), rel=1e-12)


def test_k_out_of_range():
    X = np.zeros((3, 1))
    for k in (0, 4):
        with pytest.raises(ValueError):
            kmeans(X, k)


def test_kmeans_deterministic():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(30, 2))
    a, b = kmeans(X, 4, seed=9), kmeans(X, 4, seed=9)
    assert np.array_equal(a.assignments, b.assignments)
    assert np.array_equal(a.centroids, b.centroids)


@settings(max_examples=60, deadline=None)
@given(
    st.tuples(st.integers(2, 25), st.integers(1, 3)).flatmap(
        lambda s: arrays(np.float64, s, elements=st.floats(-50, 50, allow_nan=False, width=32))
    ),
    st.integers(1, 5),
    st.integers(0, 1000),
)
def test_model_invariants(X, k, seed):
    k = min(k, len(X))
    model = kmeans(X, k, seed=seed, restarts=2)
    assert model.assignments.min() >= 0 and model.assignments.max() < k
    for j in range(k):
        members = X[model.assignments == j]
        assert len(members) > 0
        np.testing.assert_allclose(model.centroids[j], members.mean(axis=0), atol=1e-9)
    wcss = float(((X - model.centroids[model.assignments]) ** 2).sum())
    assert model.wcss == pytest.approx(wcss, rel=1e-12, abs=1e-12)
    hist = np.array(model.wcss_history)
    assert np.all(np.diff(hist) <= 1e-9 * (1 + hist[:-1]))


def test_lloyd_repairs_empty_cluster():
    X = np.array([[0.0], [1.0], [2.0], [30.0]])
    # second and third start centroids sit far away: one of them gets no points
    model = lloyd(X, np.array([[1.0], [100.0], [101.0]]))
    assert np.bincount(model.assignments, minlength=3).min() >= 1


@settings(max_examples=40, deadline=None)
@given(
    st.tuples(st.integers(2, 7), st.integers(1, 2)).flatmap(
        lambda s: arrays(np.float64, s, elements=st.floats(-10, 10, allow_nan=False, width=16))
    ),
    st.integers(1, 3),
)
def test_matches_exhaustive_optimum(X, k):
    k = min(k, len(X))
    assert kmeans(X, k, seed=0).wcss == pytest.approx(best_partition_wcss(X, k), abs=1e-9)


def test_elbow_example_curve():
    assert choose_elbow([1, 2, 3, 4, 5], [100, 20, 18, 17, 16]) == 2


def test_elbow_hand_distances():
    # normalized y = (w - 16) / 84, x = (k - 1) / 4; chord is x + y = 1
    ks, w = [1, 2, 3, 4, 5], [100, 20, 18, 17, 16]
    dist = [abs((k - 1) / 4 + (v - 16) / 84 - 1) / math.sqrt(2) for k, v in zip(ks, w)]
    assert max(range(5), key=lambda i: (dist[i], -i)) == 1


def test_elbow_linear_curve_ties_to_smallest_interior():
    assert choose_elbow([1, 2, 3, 4, 5], [40, 30, 20, 10, 0]) == 2


def test_elbow_degenerate_curves():
    assert choose_elbow([1, 2], [5.0, 0.0]) == 1
    assert choose_elbow([1, 2, 3], [0.0, 0.0, 0.0]) == 1


def test_elbow_select_blobs():
    rng = np.random.default_rng(11)
    centers = np.array([[0, 0], [10, 0], [5, 8.66]])
    X = np.vstack([c + rng.normal(size=(30, 2)) for c in centers])
    curve = elbow_select(X, k_max=10, seed=3)
    assert curve.chosen_k == 3
    assert curve.ks == tuple(range(1, 11))
    assert all(b <= a + 1e-9 for a, b in zip(curve.wcss_values, curve.wcss_values[1:]))
    model = curve.model_for(3)
    labels = model.assignments.reshape(3, 30)
    assert all(len(set(row)) == 1 for row in labels)


def test_elbow_select_clamps_to_n():
    X = np.array([[0.0], [1.0], [5.0]])
    assert elbow_select(X, k_max=10).ks == (1, 2, 3)


def test_elbow_select_errors():
    with pytest.raises(InsufficientDataError):
        elbow_select(np.zeros((1, 2)))
    with pytest.raises(ValueError):
        elbow_select(np.zeros((4, 2)), k_max=1)


def test_elbow_csv():
    curve = elbow_select(np.array([[0.0], [0.1], [5.0], [5.2], [9.0]]), k_max=4, seed=0)
    lines = curve.to_csv().splitlines()
    assert lines[0] == "k,wcss,chosen"
    assert len(lines) == 5
    assert sum(int(line.split(",")[2]) for line in lines[1:]) == 1


@pytest.mark.parametrize(
    "u, v, metric, expected",
    [
        ((1, 0), (0, 1), "cosine", 1.0),
        ((3, 4), (3, 4), "cosine", 0.0),
        ((1, 2), (4, 6), "manhattan", 7.0),
        ((1, 2), (4, 6), "euclidean", 5.0),
        ((1, 0), (-1, 0), "cosine", 2.0),
    ],
)
def test_distance_examples(u, v, metric, expected):
    assert distance(u, v, metric) == pytest.approx(expected, abs=1e-12)


def test_distance_errors():
    with pytest.raises(DegenerateVectorError):
        distance((0, 0), (1, 0), "cosine")
    with pytest.raises(DimensionError):
        distance((1, 0), (1, 0, 0), "euclidean")
    with pytest.raises(ValueError):
        distance((1, 0), (1, 0), "chebyshev")


nonzero = arrays(np.float64, 4, elements=st.floats(-10, 10, allow_nan=False)).filter(
    lambda a: np.linalg.norm(a) > 1e-3
)


@given(nonzero, nonzero, st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_cosine_range_and_scale_invariance(u, v, a, b):
    d = distance(u, v, "cosine")
    assert 0.0 <= d <= 2.0
    assert distance(a * u, b * v, "cosine") == pytest.approx(d, abs=1e-9)
