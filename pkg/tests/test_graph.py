import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pfskl.eigen import EigenSystem, eig_sym
from pfskl.errors import ArgumentError, ParseError, ValidationError
from pfskl.graph import (
    UNLABELED,
    Dataset,
    connected_components,
    gaussian_weights,
    knn_graph,
    laplacian_power,
    load_dataset,
    manifold_regularizer,
    normalized_laplacian,
)
from pfskl.oracle import count_components, regularizer_identity

from .conftest import graph_from_dense


def edge_set(graph):
    return {tuple(e) for e in graph.edges.tolist()}


def test_dense_csv_reorders_labeled_first(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("0.0,1.0,1\n2.0,3.0,?\n4.0,5.0,0\n")
    data = load_dataset(path)
    assert data.n == 3 and data.n_l == 2
    assert data.permutation.tolist() == [0, 2, 1]
    assert data.labels.tolist() == [1, 0, UNLABELED]
    np.testing.assert_array_equal(data.features[2], [2.0, 3.0])


def test_sparse_text_row(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("1 3:0.5 7:2.0\n? 1:1\n")
    data = load_dataset(path, "sparse-text")
    assert data.features.shape == (2, 7)
    np.testing.assert_array_equal(np.flatnonzero(data.features[0]), [2, 6])
    np.testing.assert_array_equal(data.features[0, [2, 6]], [0.5, 2.0])
    assert data.n_l == 1


def test_sparse_text_maps_signed_labels(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("-1 1:1\n+1 2:1\n? 1:0.5\n")
    data = load_dataset(path, "sparse-text")
    assert data.classes == (-1, 1)
    assert data.labels.tolist() == [0, 1, UNLABELED]


def test_all_unlabeled_is_rejected(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("0,?\n1,?\n")
    with pytest.raises(ValidationError):
        load_dataset(path)


@pytest.mark.parametrize(
    "text, line",
    [("0,1\n1,2,3\n", 2), ("0,1\nx,0\n", 2), ("0,1\n1,0.5\n", 2)],
)
def test_malformed_csv_reports_line(tmp_path, text, line):
    path = tmp_path / "d.csv"
    path.write_text(text)
    with pytest.raises(ParseError) as info:
        load_dataset(path)
    assert info.value.line == line


def test_malformed_sparse_reports_line(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("1 1:1\n0 0:3\n")
    with pytest.raises(ParseError) as info:
        load_dataset(path, "sparse-text")
    assert info.value.line == 2


def test_knn_collinear_points():
    X = np.array([[0.0], [1.0], [3.0]])
    g = knn_graph(X, 1)
    assert edge_set(g) == {(0, 1), (1, 2)}
    np.testing.assert_array_equal(g.weights, [1.0, 4.0])


def test_knn_two_points():
    g = knn_graph(np.array([[0.0, 0.0], [1.0, 1.0]]), 1)
    assert edge_set(g) == {(0, 1)}


@pytest.mark.parametrize("k", [0, 3, 4])
def test_knn_rejects_bad_k(k):
    with pytest.raises(ArgumentError):
        knn_graph(np.zeros((3, 2)), k)


def test_knn_ties_prefer_lower_index():
    # vertex 0 is equidistant from (1, 0) and (0, 1); every other vertex has a closer partner
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.1], [1.1, 0.0]])
    assert edge_set(knn_graph(X, 1)) == {(0, 1), (1, 4), (2, 3)}
    assert edge_set(knn_graph(X[[0, 2, 1, 3, 4]], 1)) == {(0, 1), (2, 4), (1, 3)}


def test_knn_matches_exhaustive_or_union(rng):
    X = rng.standard_normal((25, 3))
    k = 4
    D = ((X[:, None, :] - X[None, :, :]) ** 2).sum(-1)
    expected = set()
    for i in range(25):
        order = sorted((D[i, j], j) for j in range(25) if j != i)
        for _, j in order[:k]:
            expected.add((min(i, j), max(i, j)))
    assert edge_set(knn_graph(X, k)) == expected


def test_knn_duplicate_points_allowed():
    X = np.array([[0.0], [0.0], [5.0]])
    g = gaussian_weights(knn_graph(X, 1))
    w = dict(zip(map(tuple, g.edges.tolist()), g.weights))
    assert w[(0, 1)] == 1.0


def test_gaussian_single_edge():
    g = graph_from_dense([[0, 2.0], [2.0, 0]])
    out = gaussian_weights(g)
    assert out.sigma2 == 2.0
    np.testing.assert_allclose(out.weights, [np.exp(-0.5)], rtol=1e-15)
    assert abs(out.weights[0] - 0.6065306597126334) < 1e-15


def test_gaussian_two_edges():
    g = graph_from_dense([[0, 1.0, 0], [1.0, 0, 3.0], [0, 3.0, 0]])
    out = gaussian_weights(g)
    assert out.sigma2 == 2.0
    np.testing.assert_allclose(out.weights, [np.exp(-0.25), np.exp(-0.75)], rtol=1e-15)


def test_gaussian_all_zero_distances_warns():
    g = knn_graph(np.zeros((3, 2)), 1)
    with pytest.warns(RuntimeWarning):
        out = gaussian_weights(g)
    assert out.sigma2 == 1.0
    np.testing.assert_array_equal(out.weights, 1.0)


def test_gaussian_weights_symmetric_and_in_unit_interval(rng):
    g = gaussian_weights(knn_graph(rng.standard_normal((40, 4)), 5))
    S = g.similarity.toarray()
    assert np.array_equal(S, S.T)
    assert np.all(np.diag(S) == 0)
    assert np.all((g.weights > 0) & (g.weights <= 1))


@given(scale=st.floats(0.01, 100.0))
@settings(max_examples=25, deadline=None)
def test_gaussian_weights_scale_invariant(scale):
    X = np.random.default_rng(7).standard_normal((30, 3))
    base = gaussian_weights(knn_graph(X, 4))
    scaled = gaussian_weights(knn_graph(scale * X, 4))
    assert edge_set(base) == edge_set(scaled)
    np.testing.assert_allclose(scaled.weights, base.weights, rtol=1e-9, atol=1e-12)


def test_laplacian_two_nodes():
    L = normalized_laplacian(graph_from_dense([[0, 1.0], [1.0, 0]])).matrix
    np.testing.assert_allclose(L, [[1, -1], [-1, 1]], atol=1e-15)
    np.testing.assert_allclose(eig_sym(L).gamma, [0, 2], atol=1e-12)


def test_laplacian_two_components_has_two_zero_eigenvalues():
    S = np.zeros((5, 5))
    S[0, 1] = S[1, 0] = 1.0
    S[1, 2] = S[2, 1] = 0.5
    S[3, 4] = S[4, 3] = 2.0
    gamma = eig_sym(normalized_laplacian(graph_from_dense(S)).matrix).gamma
    assert np.sum(np.abs(gamma) < 1e-8) == 2


def test_laplacian_kills_sqrt_degree_vector(rng):
    g = gaussian_weights(knn_graph(rng.standard_normal((50, 3)), 5))
    L = normalized_laplacian(g).matrix
    assert np.max(np.abs(L - L.T)) <= 1e-12
    assert np.max(np.abs(L @ np.sqrt(g.degrees))) <= 1e-8
    gamma = eig_sym(L).gamma
    assert gamma[0] >= -1e-8 and gamma[-1] <= 2 + 1e-8


def test_isolated_vertex_is_reconnected():
    X = np.array([[0.0], [1.0], [2.0], [9.0]])
    g = knn_graph(X, 1)
    # drop the edge touching vertex 3 to leave it isolated
    keep = ~np.any(g.edges == 3, axis=1)
    g = type(g)(n=g.n, edges=g.edges[keep], weights=g.weights[keep], features=X)
    with pytest.warns(RuntimeWarning):
        L = normalized_laplacian(gaussian_weights(g)).matrix
    assert np.all(np.isfinite(L))
    assert L[3, 2] < 0


def test_isolated_vertex_without_features_is_an_error():
    g = graph_from_dense([[0, 1.0, 0], [1.0, 0, 0], [0, 0, 0]])
    with pytest.raises(ArgumentError):
        normalized_laplacian(g)


def test_component_count_matches_union_find_and_spectrum(rng):
    for _ in range(10):
        n = int(rng.integers(6, 30))
        blocks = int(rng.integers(1, 4))
        comp = np.sort(rng.integers(0, blocks, n))
        S = np.zeros((n, n))
        for c in np.unique(comp):
            idx = np.flatnonzero(comp == c)
            for a, b in zip(idx[:-1], idx[1:]):
                S[a, b] = S[b, a] = rng.uniform(0.1, 1.0)
        g = graph_from_dense(S)
        expected = count_components(n, g.edges)
        assert connected_components(g) == expected
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            gamma = eig_sym(normalized_laplacian(g).matrix).gamma if np.all(g.degrees > 0) else None
        if gamma is not None:
            assert np.sum(gamma < 1e-8) == expected


def test_laplacian_power():
    eig = EigenSystem(np.eye(3), np.array([0.0, 0.5, 2.0]))
    assert laplacian_power(eig, 1) is eig
    np.testing.assert_array_equal(laplacian_power(eig, 2).gamma, [0.0, 0.25, 4.0])
    assert laplacian_power(eig, 5).U is eig.U
    with pytest.raises(ArgumentError):
        laplacian_power(eig, 0)


def test_manifold_regularizer(rng):
    g = gaussian_weights(knn_graph(rng.standard_normal((20, 2)), 3))
    L = normalized_laplacian(g)
    gamma = eig_sym(L.matrix).gamma
    np.testing.assert_allclose(manifold_regularizer(np.eye(20), L), gamma.sum(), rtol=1e-12)
    assert manifold_regularizer(np.zeros((20, 20)), L) == 0.0
    V = rng.standard_normal((4, 20))
    direct = np.trace(V @ L.matrix @ V.T)
    np.testing.assert_allclose(manifold_regularizer(V.T @ V, L), direct, rtol=1e-10)
    assert manifold_regularizer(V.T @ V, L) >= 0
    with pytest.raises(ArgumentError):
        manifold_regularizer(np.eye(3), L)


@given(arrays(np.float64, (8, 2), elements=st.floats(-3, 3)))
@settings(max_examples=30, deadline=None)
def test_regularizer_identity_property(V):
    S = np.random.default_rng(1).random((8, 8))
    S = np.triu(S, 1)
    S = S + S.T
    assert regularizer_identity(V, S) <= 1e-9


def test_dataset_prefix_invariant():
    with pytest.raises(ArgumentError):
        Dataset(
            features=np.zeros((2, 1)),
            labels=np.array([UNLABELED, 0]),
            n_l=1,
            n_classes=1,
            permutation=np.arange(2),
        )
