"""Synthetic data, labeled/unlabeled splits and the transductive evaluation loop."""

import io
import json
import time
from dataclasses import asdict, dataclass, field
from statistics import NormalDist

import numpy as np

from . import rls, skl
from .eigen import eig_sym
from .errors import ArgumentError, SklError, ValidationError
from .graph import (
    UNLABELED,
    Dataset,
    gaussian_weights,
    knn_graph,
    laplacian_power,
    load_dataset,
    normalized_laplacian,
)

ALGORITHMS = {
    "skl_kta": (),
    "skl": ("C", "mu"),
    "rls_baseline": ("C",),
    "diffusion": ("sigma2",),
    "gaussian_field": ("eps_k",),
}


def g50c_mean_offset():
    """Half the distance between the two class means for a 5% Bayes error."""
    return NormalDist().inv_cdf(0.95)


def gen_g50c(seed, n=550, d=50):
    """Two unit-covariance Gaussians in ``d`` dimensions with equal priors.

    The means sit at ``+/- h e_1`` with ``h`` the 95% standard normal quantile,
    so the Bayes-optimal rule ``sign(x_1)`` errs on 5% of the points.
    """
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=n)
    X = rng.standard_normal((n, d))
    X[:, 0] += np.where(labels == 1, 1.0, -1.0) * g50c_mean_offset()
    return Dataset.from_arrays(X, labels, n_classes=2, classes=(0, 1))


def make_splits(data, n_l, splits, seed, max_tries=100_000):
    """Random labeled masks with at least one labeled point per class.

    Only points whose label is known are eligible. Masks are boolean arrays
    over the rows of ``data`` and depend only on ``seed``.
    """
    eligible = np.flatnonzero(data.labels != UNLABELED)
    c = data.n_classes
    if n_l < c:
        raise ArgumentError(f"n_l={n_l} cannot cover {c} classes")
    if n_l > eligible.size:
        raise ArgumentError(f"n_l={n_l} exceeds the {eligible.size} points with known labels")
    if splits < 1:
        raise ArgumentError("need at least one split")
    rng = np.random.default_rng(seed)
    masks = []
    for _ in range(splits):
        for _ in range(max_tries):
            pick = rng.choice(eligible, size=n_l, replace=False)
            if np.unique(data.labels[pick]).size == c:
                break
        else:
            raise ValidationError(f"no split with every class found in {max_tries} draws")
        mask = np.zeros(data.n, dtype=bool)
        mask[pick] = True
        masks.append(mask)
    return masks


def apply_split(data, mask):
    """Dataset whose labeled prefix is ``mask``; also returns the row order used."""
    order = np.concatenate([np.flatnonzero(mask), np.flatnonzero(~mask)])
    labels = np.where(mask, data.labels, UNLABELED)[order]
    split = Dataset(
        features=data.features[order],
        labels=labels,
        n_l=int(mask.sum()),
        n_classes=data.n_classes,
        permutation=data.permutation[order],
        classes=data.classes,
    )
    return split, order


@dataclass
class ExperimentConfig:
    dataset: object
    k: int
    p: int = 1
    eps: float = skl.DEFAULT_EPS
    algorithm: dict = field(default_factory=lambda: {"name": "skl_kta"})
    splits: int = 10
    n_l: int = 50
    seed: int = 0
    format: str = "dense-csv"

    def __post_init__(self):
        if isinstance(self.algorithm, str):
            self.algorithm = {"name": self.algorithm}
        name = self.algorithm.get("name")
        if name not in ALGORITHMS:
            raise ArgumentError(f"unknown algorithm {name!r}")
        for key in ALGORITHMS[name]:
            if key not in self.algorithm:
                raise ArgumentError(f"algorithm {name} needs parameter {key!r}")
        for key, value in self.algorithm.items():
            if key != "name" and not (isinstance(value, (int, float)) and value > 0):
                raise ArgumentError(f"algorithm parameter {key} must be a positive number")
        if not isinstance(self.dataset, (str, dict)):
            raise ArgumentError("dataset must be a path or a generator description")
        if isinstance(self.dataset, dict) and self.dataset.get("generator") != "g50c":
            raise ArgumentError(f"unknown generator in {self.dataset!r}")
        for key in ("k", "p", "splits", "n_l"):
            value = getattr(self, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ArgumentError(f"{key} must be a positive integer, got {value!r}")
        if not (isinstance(self.eps, (int, float)) and self.eps > 0):
            raise ArgumentError("eps must be positive")
        if not isinstance(self.seed, int):
            raise ArgumentError("seed must be an integer")

    @classmethod
    def from_dict(cls, doc):
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ArgumentError(f"unknown config fields: {sorted(unknown)}")
        missing = {"dataset", "k"} - set(doc)
        if missing:
            raise ArgumentError(f"missing config fields: {sorted(missing)}")
        return cls(**doc)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ArgumentError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ArgumentError("config must be a JSON object")
        return cls.from_dict(doc)

    def to_dict(self):
        return asdict(self)


@dataclass
class Report:
    """Per-split accuracies plus their mean and (population) standard deviation.

    ``predictions[s][i]`` is the label predicted in split ``s`` for the point
    at original index ``i`` (labeled points keep their given label).
    """

    config: dict
    accuracies: list
    mean: float
    std: float
    timing: dict
    predictions: list
    n: int
    n_unlabeled: int

    def to_dict(self, timing=True):
        doc = asdict(self)
        if not timing:
            doc.pop("timing")
        return doc

    def to_json(self, timing=True):
        return json.dumps(self.to_dict(timing=timing), indent=2)


def load_config_dataset(config):
    if isinstance(config.dataset, dict):
        gen = config.dataset
        return gen_g50c(int(gen.get("seed", 0)), n=int(gen.get("n", 550)), d=int(gen.get("d", 50)))
    return load_dataset(config.dataset, config.format)


def build_eigensystem(data, k, p):
    """Graph Laplacian eigensystem shared by all splits; returns (eig, timings)."""
    t0 = time.perf_counter()
    L = normalized_laplacian(gaussian_weights(knn_graph(data, k)))
    t1 = time.perf_counter()
    eig = laplacian_power(eig_sym(L.matrix), p)
    t2 = time.perf_counter()
    return eig, {"graph": t1 - t0, "eig": t2 - t1}


def fit_predict(config, split, eig):
    """Fit the configured algorithm on one split and predict its unlabeled block."""
    algo = config.algorithm
    name = algo["name"]
    query = np.arange(split.n_l, split.n)
    if name == "rls_baseline":
        labels = skl.LabelMatrix.from_labels(split.labeled, split.n_classes)
        K = rls.gaussian_kernel(split.features)
        lab = np.arange(split.n_l)
        sol = rls.rls_solve(K[np.ix_(lab, lab)], labels.Y, algo["C"])
        values = rls.rls_predict(K[np.ix_(query, lab)], sol)
        if labels.binary:
            return (values[:, 0] >= 0).astype(np.int64)
        return np.argmax(values, axis=1)
    if name == "skl_kta":
        model = skl.fit_skl_kta(split, eig, config.eps)
    elif name == "skl":
        model = skl.fit_skl(split, eig, algo["C"], algo["mu"], config.eps)
    elif name == "diffusion":
        model = skl.fit_transform(split, eig, "diffusion", algo["sigma2"], C=algo.get("C", 1.0), eps=config.eps)
    else:
        model = skl.fit_transform(split, eig, "gaussian_field", algo["eps_k"], C=algo.get("C", 1.0), eps=config.eps)
    return skl.predict(model, query)[1]


def _tag_split(exc, s):
    try:
        tagged = type(exc)(f"split {s}: {exc}")
    except TypeError:
        return exc
    tagged.split = s
    return tagged


def run_experiment(config, data=None, cache=True):
    """Transductive evaluation over ``config.splits`` random labeled subsets.

    The graph and its eigendecomposition do not depend on the labels, so they
    are built once and reused by every split unless ``cache`` is false.
    """
    base = load_config_dataset(config) if data is None else data
    timing = {"graph": 0.0, "eig": 0.0, "fit": 0.0, "predict": 0.0}
    eig = None
    if cache and config.algorithm["name"] != "rls_baseline":
        eig, t = build_eigensystem(base, config.k, config.p)
        timing.update(t)
    masks = make_splits(base, config.n_l, config.splits, config.seed)
    classes = list(base.classes) or list(range(base.n_classes))
    accuracies, predictions = [], []
    n_unlabeled = 0
    for s, mask in enumerate(masks):
        split, order = apply_split(base, mask)
        split_eig = None
        if config.algorithm["name"] != "rls_baseline":
            if eig is None:
                full, t = build_eigensystem(base, config.k, config.p)
                timing["graph"] += t["graph"]
                timing["eig"] += t["eig"]
            else:
                full = eig
            split_eig = full.permuted(order)
        t0 = time.perf_counter()
        try:
            pred = fit_predict(config, split, split_eig)
        except SklError as exc:
            raise _tag_split(exc, s) from exc
        timing["fit"] += time.perf_counter() - t0
        t1 = time.perf_counter()
        truth = base.labels[order][split.n_l :]
        known = truth != UNLABELED
        n_unlabeled = int(known.sum())
        accuracies.append(float(np.mean(pred[known] == truth[known])) if known.any() else None)
        full_pred = np.empty(base.n, dtype=np.int64)
        full_pred[split.permutation] = np.concatenate([split.labeled, pred])
        predictions.append([classes[c] for c in full_pred.tolist()])
        timing["predict"] += time.perf_counter() - t1
    defined = [a for a in accuracies if a is not None]
    mean = float(np.mean(defined)) if defined else None
    std = float(np.std(defined)) if defined else None
    return Report(
        config=config.to_dict(),
        accuracies=accuracies,
        mean=mean,
        std=std,
        timing=timing,
        predictions=predictions,
        n=base.n,
        n_unlabeled=n_unlabeled,
    )


def dump_spectrum(config, data=None):
    """CSV of ``index, gamma, a, lambda_bar`` for the first split, ascending in ``gamma``."""
    base = load_config_dataset(config) if data is None else data
    eig, _ = build_eigensystem(base, config.k, config.p)
    mask = make_splits(base, config.n_l, 1, config.seed)[0]
    split, order = apply_split(base, mask)
    model = skl.fit_skl_kta(split, eig.permuted(order), config.eps)
    co = skl.spectral_coefficients(model.eig, model.labels, config.eps)
    out = io.StringIO()
    out.write("index,gamma,a,lambda_bar\n")
    for i in np.argsort(model.eig.gamma, kind="stable"):
        out.write(f"{i},{model.eig.gamma[i]:.17g},{co.a[i]:.17g},{model.spectrum[i]:.17g}\n")
    return out.getvalue()
