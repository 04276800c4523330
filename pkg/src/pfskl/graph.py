"""Datasets, k-NN similarity graphs and the normalized graph Laplacian."""

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .eigen import EigenSystem
from .errors import ArgumentError, ParseError, ValidationError

UNLABELED = -1
SENTINEL = "?"


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with partial labels.

    Labeled points always occupy rows ``0 .. n_l - 1``. ``labels`` holds class
    ids in ``0 .. n_classes - 1`` and ``UNLABELED`` elsewhere. ``permutation[i]``
    is the original (file) index of row ``i``; ``classes`` maps class ids back
    to the label values found in the source.
    """

    features: np.ndarray
    labels: np.ndarray
    n_l: int
    n_classes: int
    permutation: np.ndarray
    classes: tuple = ()

    def __post_init__(self):
        n = self.features.shape[0]
        if self.labels.shape != (n,) or self.permutation.shape != (n,):
            raise ArgumentError("labels/permutation length does not match features")
        if not 1 <= self.n_l <= n:
            raise ValidationError(f"need at least one labeled point, got n_l={self.n_l}")
        if np.any(self.labels[: self.n_l] == UNLABELED) or np.any(self.labels[self.n_l :] != UNLABELED):
            raise ArgumentError("labeled points must form the prefix of the dataset")

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def labeled(self):
        return self.labels[: self.n_l]

    @classmethod
    def from_arrays(cls, features, labels, n_classes=None, permutation=None, classes=()):
        """Build a dataset, moving labeled rows to the front (stable order)."""
        features = np.asarray(features, dtype=float)
        if features.ndim != 2:
            raise ArgumentError("features must be a 2-D array")
        labels = np.asarray(labels, dtype=np.int64)
        n = features.shape[0]
        if permutation is None:
            permutation = np.arange(n)
        known = labels != UNLABELED
        if not known.any():
            raise ValidationError("dataset has no labeled points")
        if np.any(labels[known] < 0):
            raise ValidationError("class ids must be non-negative")
        if n_classes is None:
            n_classes = int(labels[known].max()) + 1
        elif np.any(labels[known] >= n_classes):
            raise ValidationError("class id out of range")
        order = np.concatenate([np.flatnonzero(known), np.flatnonzero(~known)])
        return cls(
            features=features[order],
            labels=labels[order],
            n_l=int(known.sum()),
            n_classes=int(n_classes),
            permutation=np.asarray(permutation)[order],
            classes=tuple(classes),
        )


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph on ``n`` vertices.

    Each undirected edge ``(i, j)`` with ``i < j`` appears once in ``edges``.
    Right after :func:`knn_graph` the weights are squared Euclidean distances;
    :func:`gaussian_weights` turns them into similarities.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray
    features: np.ndarray = field(default=None, repr=False)
    sigma2: float = None

    @property
    def similarity(self):
        """Symmetric sparse similarity matrix ``S`` with zero diagonal."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        data = np.concatenate([self.weights, self.weights])
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @property
    def degrees(self):
        d = np.zeros(self.n)
        np.add.at(d, self.edges[:, 0], self.weights)
        np.add.at(d, self.edges[:, 1], self.weights)
        return d


@dataclass(frozen=True)
class Laplacian:
    matrix: np.ndarray

    @property
    def n(self):
        return self.matrix.shape[0]


def _map_labels(raw):
    """Map raw label strings (or None) to class ids; returns (ids, classes)."""
    values = sorted({int(r) for r in raw if r is not None})
    lookup = {v: c for c, v in enumerate(values)}
    ids = np.array([UNLABELED if r is None else lookup[int(r)] for r in raw], dtype=np.int64)
    return ids, values


def _parse_label(token, line):
    token = token.strip()
    if token == SENTINEL:
        return None
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"bad label {token!r}", line) from None
    if not value.is_integer():
        raise ParseError(f"label must be an integer, got {token!r}", line)
    return int(value)


def _read_dense_csv(path):
    rows, raw = [], []
    width = None
    with open(path, newline="") as fh:
        for line, record in enumerate(csv.reader(fh), start=1):
            if not record or not "".join(record).strip() or record[0].lstrip().startswith("#"):
                continue
            if len(record) < 2:
                raise ParseError("need at least one feature column and a label column", line)
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise ParseError(f"expected {width} columns, got {len(record)}", line)
            try:
                rows.append([float(tok) for tok in record[:-1]])
            except ValueError as exc:
                raise ParseError(str(exc), line) from None
            raw.append(_parse_label(record[-1], line))
    return np.array(rows, dtype=float).reshape(len(rows), (width or 1) - 1), raw


def _read_sparse_text(path):
    entries, raw = [], []
    dim = 0
    with open(path) as fh:
        for line, text in enumerate(fh, start=1):
            text = text.split("#", 1)[0].strip()
            if not text:
                continue
            tokens = text.split()
            row = {}
            if ":" in tokens[0]:
                raise ParseError("missing label", line)
            for tok in tokens[1:]:
                key, sep, val = tok.partition(":")
                if not sep:
                    raise ParseError(f"malformed feature {tok!r}", line)
                if key == "qid":
                    continue
                try:
                    idx, value = int(key), float(val)
                except ValueError:
                    raise ParseError(f"malformed feature {tok!r}", line) from None
                if idx < 1:
                    raise ParseError(f"feature indices are 1-based, got {idx}", line)
                row[idx - 1] = value
                dim = max(dim, idx)
            entries.append(row)
            raw.append(_parse_label(tokens[0], line))
    X = np.zeros((len(entries), dim))
    for r, row in enumerate(entries):
        for c, v in row.items():
            X[r, c] = v
    return X, raw


def load_dataset(path, format="dense-csv"):
    """Read a dataset from disk.

    ``dense-csv`` files hold one point per row with the label in the last
    column; ``sparse-text`` files use ``<label> <index>:<value> ...`` lines
    with 1-based indices. A label of ``?`` marks an unlabeled point. Distinct
    label values are mapped to class ids ``0 .. c-1`` in increasing order.
    """
    if format == "dense-csv":
        X, raw = _read_dense_csv(path)
    elif format == "sparse-text":
        X, raw = _read_sparse_text(path)
    else:
        raise ArgumentError(f"unknown dataset format {format!r}")
    if not raw:
        raise ValidationError(f"{path}: no data rows")
    ids, values = _map_labels(raw)
    return Dataset.from_arrays(X, ids, n_classes=len(values), classes=values)


def pairwise_sq_distances(X, Y=None):
    X = np.asarray(X, dtype=float)
    Y = X if Y is None else np.asarray(Y, dtype=float)
    sq = np.einsum("ij,ij->i", X, X)
    sqy = sq if Y is X else np.einsum("ij,ij->i", Y, Y)
    D = sq[:, None] + sqy[None, :] - 2.0 * (X @ Y.T)
    return np.maximum(D, 0.0)


def _edge_sq_distances(X, edges):
    diff = X[edges[:, 0]] - X[edges[:, 1]]
    return np.einsum("ij,ij->i", diff, diff)


def knn_graph(data, k, block_size=1024):
    """Symmetric k-nearest-neighbor graph.

    Vertex ``j`` is adjacent to ``i`` when either one is among the other's
    ``k`` nearest neighbors in Euclidean distance. Equidistant candidates are
    resolved in favour of the lower index. Edge weights are squared distances.
    """
    X = data.features if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ArgumentError(f"k must satisfy 1 <= k < n (k={k}, n={n})")
    nbrs = np.empty((n, k), dtype=np.int64)
    for start in range(0, n, block_size):
        stop = min(n, start + block_size)
        D = pairwise_sq_distances(X[start:stop], X)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        nbrs[start:stop] = np.argsort(D, axis=1, kind="stable")[:, :k]
    src = np.repeat(np.arange(n), k)
    dst = nbrs.ravel()
    pairs = np.unique(np.stack([np.minimum(src, dst), np.maximum(src, dst)], axis=1), axis=0)
    return Graph(n=n, edges=pairs, weights=_edge_sq_distances(X, pairs), features=X)


def gaussian_weights(graph):
    """Replace squared-distance weights by ``exp(-dist2 / (2 sigma2))``.

    ``sigma2`` is the mean squared distance over the undirected edges.
    """
    if graph.edges.shape[0] == 0:
        raise ArgumentError("graph has no edges")
    sigma2 = float(np.mean(graph.weights))
    if sigma2 == 0.0:
        warnings.warn("all edge distances are zero; using sigma2 = 1", RuntimeWarning, stacklevel=2)
        sigma2 = 1.0
    weights = np.exp(-graph.weights / (2.0 * sigma2))
    return Graph(n=graph.n, edges=graph.edges, weights=weights, features=graph.features, sigma2=sigma2)


def _repair_isolated(graph):
    d = graph.degrees
    isolated = np.flatnonzero(d <= 0)
    if isolated.size == 0:
        return graph
    if graph.features is None:
        raise ArgumentError(f"isolated vertices {isolated.tolist()} and no features to reconnect them")
    X = graph.features
    sigma2 = graph.sigma2 or 1.0
    extra, extra_w = [], []
    for i in isolated:
        D = pairwise_sq_distances(X[i : i + 1], X)[0]
        D[i] = np.inf
        j = int(np.argmin(D))
        dist2 = float(np.sum((X[i] - X[j]) ** 2))
        w = np.exp(-dist2 / (2.0 * sigma2)) if graph.sigma2 else dist2
        extra.append((min(i, j), max(i, j)))
        extra_w.append(max(w, np.finfo(float).tiny))
    warnings.warn(f"connected {isolated.size} isolated vertices to their nearest neighbor", RuntimeWarning, stacklevel=3)
    edges = np.concatenate([graph.edges, np.array(extra, dtype=np.int64)])
    weights = np.concatenate([graph.weights, extra_w])
    return Graph(n=graph.n, edges=edges, weights=weights, features=graph.features, sigma2=graph.sigma2)


def normalized_laplacian(graph):
    """Dense ``L = I - D^{-1/2} S D^{-1/2}``."""
    graph = _repair_isolated(graph)
    d = graph.degrees
    inv_sqrt = 1.0 / np.sqrt(d)
    L = -(graph.similarity.toarray() * inv_sqrt[:, None]) * inv_sqrt[None, :]
    L[np.diag_indices(graph.n)] += 1.0
    return Laplacian(0.5 * (L + L.T))


def connected_components(graph):
    count, _ = csgraph.connected_components(graph.similarity, directed=False)
    return count


def laplacian_power(eig, p):
    """Eigensystem of ``L^p``: eigenvalues raised to ``p``, eigenvectors kept."""
    if int(p) != p or p < 1:
        raise ArgumentError(f"Laplacian power must be a positive integer, got {p}")
    if p == 1:
        return eig
    if np.any(eig.gamma < -1e-8):
        raise ArgumentError("Laplacian eigenvalues must be non-negative")
    return EigenSystem(eig.U, np.maximum(eig.gamma, 0.0) ** int(p))


def manifold_regularizer(K, L):
    """``tr(K L)``."""
    K = np.asarray(K, dtype=float)
    L = L.matrix if isinstance(L, Laplacian) else np.asarray(L, dtype=float)
    if K.shape != L.shape or K.ndim != 2:
        raise ArgumentError(f"shape mismatch: K {K.shape} vs L {L.shape}")
    return float(np.einsum("ij,ji->", K, L))
