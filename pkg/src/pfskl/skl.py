"""Spectral kernel learning on a graph Laplacian eigensystem.

The learned kernel is ``K = U diag(spectrum) U^T`` where ``U`` holds the
Laplacian eigenvectors. Everything is driven by two per-eigenvector
quantities:

* ``a_i``: squared projection of the labels onto eigenvector ``i`` restricted
  to the labeled rows, ``sum_k (U_l[:, i]^T Y[:, k])^2``;
* ``b_i``: the eigenvalue plus a small ridge, ``gamma_i + eps``.

With these, minimizing ``1/2 y^T (K + I/C)^{-1} y + mu tr(K L)`` over the
spectrum, choosing ``mu`` by kernel-target alignment, and the resulting
parameter-free decision function all have closed forms.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg

from .eigen import EigenSystem, degenerate_blocks, orient_columns
from .errors import ArgumentError, DegenerateInstanceError, NumericalError

DEFAULT_EPS = 1e-6
_REL_ZERO = 1e-12


@dataclass(frozen=True)
class LabelMatrix:
    """Labels of the ``n_l`` labeled points as a real matrix.

    Two classes give a single ``+/-1`` column (class 1 is ``+1``); more
    classes give one-hot rows.
    """

    Y: np.ndarray
    n_classes: int

    @property
    def binary(self):
        return self.n_classes == 2

    @property
    def n_l(self):
        return self.Y.shape[0]

    @classmethod
    def from_labels(cls, labels, n_classes):
        labels = np.asarray(labels, dtype=np.int64)
        if n_classes < 2:
            raise ArgumentError("need at least two classes")
        if np.any(labels < 0) or np.any(labels >= n_classes):
            raise ArgumentError("label outside 0 .. n_classes - 1")
        if n_classes == 2:
            Y = np.where(labels == 1, 1.0, -1.0)[:, None]
        else:
            Y = np.zeros((labels.shape[0], n_classes))
            Y[np.arange(labels.shape[0]), labels] = 1.0
        return cls(Y, n_classes)

    def negated(self):
        return LabelMatrix(-self.Y, self.n_classes)


@dataclass(frozen=True)
class SpectralCoefficients:
    a: np.ndarray
    b: np.ndarray
    n_l: int
    yTy: float

    @property
    def n(self):
        return self.a.shape[0]

    def permuted(self, perm):
        perm = np.asarray(perm)
        return SpectralCoefficients(self.a[perm], self.b[perm], self.n_l, self.yTy)


def _as_label_matrix(Y):
    if isinstance(Y, LabelMatrix):
        return Y.Y
    Y = np.asarray(Y, dtype=float)
    return Y[:, None] if Y.ndim == 1 else Y


def spectral_coefficients(eig, Y, eps=DEFAULT_EPS):
    """Per-eigenvector label projections ``a`` and ridged eigenvalues ``b``."""
    if not eps > 0:
        raise ArgumentError(f"ridge eps must be positive, got {eps}")
    Y = _as_label_matrix(Y)
    n_l = Y.shape[0]
    if n_l > eig.n:
        raise ArgumentError(f"{n_l} labeled rows but only {eig.n} eigenvector entries")
    P = eig.U[:n_l].T @ Y
    a = np.einsum("ik,ik->i", P, P)
    b = eig.gamma + eps
    if np.any(b <= 0):
        raise ArgumentError("ridged eigenvalues must be positive")
    G = Y @ Y.T
    return SpectralCoefficients(a=a, b=b, n_l=n_l, yTy=float(np.sum(G * G)))


def _check_positive(**kw):
    for name, value in kw.items():
        if not value > 0:
            raise ArgumentError(f"{name} must be positive, got {value}")


def lambda_star(co, mu, C):
    """Spectrum minimizing the upper-bound objective for fixed ``mu`` and ``C``.

    ``lambda_i = max(0, sqrt(a_i / (2 mu b_i)) - 1/C)``
    """
    _check_positive(mu=mu, C=C)
    return np.maximum(0.0, np.sqrt(co.a / (2.0 * mu * co.b)) - 1.0 / C)


def objective_F(co, spectrum, mu, C):
    """``1/2 sum a_i / (lambda_i + 1/C) + mu sum lambda_i b_i``."""
    spectrum = np.asarray(spectrum, dtype=float)
    if np.any(spectrum < 0):
        raise ArgumentError("spectrum must be non-negative")
    return float(0.5 * np.sum(co.a / (spectrum + 1.0 / C)) + mu * np.sum(spectrum * co.b))


def kta(co, spectrum):
    """Alignment between ``U diag(spectrum) U^T`` and the ideal label kernel."""
    spectrum = np.asarray(spectrum, dtype=float)
    norm2 = float(np.sum(spectrum * spectrum))
    if norm2 == 0.0:
        raise NumericalError("alignment is undefined for an all-zero spectrum")
    return float(np.sum(spectrum * co.a) / np.sqrt(norm2 * co.yTy))


def _moments(co):
    s = np.sqrt(co.a / (2.0 * co.b))
    return {
        "s": s,
        "x": float(np.sum(co.a * s)),
        "y": float(np.sum(co.a / (2.0 * co.b))),
        "z": float(np.sum(s)),
        "u": float(np.sum(co.a)),
    }


def _vanishes(value, *terms):
    return abs(value) <= _REL_ZERO * sum(abs(t) for t in terms)


def mu_star(co, C):
    """Alignment-maximizing balance parameter for a given ``C``.

    Setting the derivative of the (unclipped) alignment to zero gives
    ``sqrt(mu)^{-1} = (z u - n x / C^2) / (y u - z x)`` with
    ``x = sum a_i s_i``, ``y = sum s_i^2``, ``z = sum s_i / C``,
    ``u = sum a_i / C`` and ``s_i = sqrt(a_i / (2 b_i))``. Only a positive root
    is a maximizer; otherwise the alignment has no interior optimum and
    :class:`DegenerateInstanceError` is raised.
    """
    _check_positive(C=C)
    if not np.any(co.a > 0):
        raise DegenerateInstanceError("labels have no projection on any eigenvector")
    m = _moments(co)
    n = co.n
    x, y, z, u = m["x"], m["y"], m["z"] / C, m["u"] / C
    num = y * u - z * x
    den = z * u - (n / C**2) * x
    if _vanishes(num, y * u, z * x) or _vanishes(den, z * u, n * x / C**2):
        raise DegenerateInstanceError(
            f"alignment stationarity equation is degenerate (num={num:.3e}, den={den:.3e})"
        )
    inv_sqrt_mu = den / num
    if inv_sqrt_mu <= 0:
        raise DegenerateInstanceError(
            "alignment stationary point has negative sqrt(mu); no interior maximizer"
        )
    mu = (num / den) ** 2
    if not np.isfinite(mu) or mu <= 0:
        raise DegenerateInstanceError(f"mu* = {mu} is not a positive finite number")
    return float(mu)


def _lambda_bar_scale(co):
    m = _moments(co)
    n = co.n
    num = m["z"] * m["u"] - n * m["x"]
    den = m["y"] * m["u"] - m["z"] * m["x"]
    if _vanishes(num, m["z"] * m["u"], n * m["x"]):
        return 0.0, m["s"]
    if _vanishes(den, m["y"] * m["u"], m["z"] * m["x"]):
        raise DegenerateInstanceError("parameter-free spectrum is undefined (zero denominator)")
    return num / den, m["s"]


def lambda_bar(co):
    """Parameter-free spectrum ``|(z u - n x) / (y u - z x)| sqrt(a_i / (2 b_i))``.

    Here ``z = sum s_i`` and ``u = sum a_i`` carry no ``1/C`` factor, so neither
    ``C`` nor ``mu`` enters. Returns all zeros when the numerator vanishes
    (e.g. all ``(a_i, b_i)`` equal).
    """
    if not np.any(co.a > 0):
        raise DegenerateInstanceError("labels have no projection on any eigenvector")
    scale, s = _lambda_bar_scale(co)
    return abs(scale) * s


def parametric_transform(eig, kind, value):
    """Classical spectral transforms of the Laplacian eigenvalues.

    ``diffusion``: ``exp(-value / 2 * gamma)`` with ``value = sigma^2``;
    ``gaussian_field``: ``1 / (gamma + value)``.
    """
    if not value > 0:
        raise ArgumentError(f"{kind} parameter must be positive, got {value}")
    gamma = eig.gamma if isinstance(eig, EigenSystem) else np.asarray(eig, dtype=float)
    if kind == "diffusion":
        return np.exp(-0.5 * value * gamma)
    if kind == "gaussian_field":
        return 1.0 / (np.maximum(gamma, 0.0) + value)
    raise ArgumentError(f"unknown transform {kind!r}")


def align_label_blocks(eig, Y, values=None, rtol=1e-10):
    """Pick a label-determined basis inside every degenerate eigenspace.

    Within a block of (numerically) equal ``values`` any orthonormal basis is
    an eigenbasis, yet ``a_i`` depends on the choice. Rotating the block onto
    the left singular vectors of ``U_block,l^T Y`` concentrates the label
    projection and makes every downstream result independent of the basis
    returned by the eigensolver.
    """
    values = eig.gamma if values is None else values
    blocks = degenerate_blocks(values, rtol=rtol)
    if not blocks:
        return eig
    Y = _as_label_matrix(Y)
    n_l = Y.shape[0]
    U = eig.U.copy()
    for blk in blocks:
        W = U[:, blk]
        Q, _, _ = np.linalg.svd(W[:n_l].T @ Y, full_matrices=True)
        U[:, blk] = orient_columns(W @ Q)
    return EigenSystem(U, eig.gamma)


def _spd_solve(A, B):
    """Solve ``A X = B`` for symmetric positive (semi)definite ``A``."""
    bnorm = max(float(np.max(np.abs(B), initial=0.0)), np.finfo(float).tiny)
    ridge = 0.0
    for attempt in range(2):
        M = A if ridge == 0.0 else A + ridge * np.eye(A.shape[0])
        try:
            X = linalg.cho_solve(linalg.cho_factor(M, lower=True), B)
        except linalg.LinAlgError:
            X = None
        if X is not None and np.all(np.isfinite(X)):
            resid = float(np.max(np.abs(M @ X - B), initial=0.0))
            if resid <= 1e-6 * bnorm:
                return X
        ridge = 1e-10 * float(np.trace(A)) / A.shape[0]
        if ridge <= 0:
            break
    raise NumericalError("labeled kernel block is singular")


def _kernel_block(eig, spectrum, rows, cols):
    return (eig.U[rows] * spectrum) @ eig.U[cols].T


@dataclass(frozen=True)
class SklModel:
    """A fitted transductive spectral kernel classifier.

    ``mode`` is ``"parameter_free"`` (decision ``(Kbar - I)_{q,l} Kbar_ll^{-1} Y``)
    or ``"parametric"`` (decision ``K_{q,l} (K_ll + I/C)^{-1} Y``). The
    parameter-free mode carries neither ``C`` nor ``mu``.
    """

    eig: EigenSystem
    spectrum: np.ndarray
    mode: str
    labels: LabelMatrix
    kind: str
    coef: np.ndarray
    eps: float = DEFAULT_EPS
    C: float = None
    mu: float = None
    dataset_digest: str = ""

    @property
    def n(self):
        return self.eig.n

    @property
    def n_l(self):
        return self.labels.n_l

    def kernel(self):
        return (self.eig.U * self.spectrum) @ self.eig.U.T


def dataset_digest(data):
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(data.features, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(data.labels, dtype="<i8").tobytes())
    return h.hexdigest()


def _prepare(data, eig, eps, align):
    if eig.n != data.n:
        raise ArgumentError(f"eigensystem has order {eig.n}, dataset has {data.n} points")
    labels = LabelMatrix.from_labels(data.labeled, data.n_classes)
    if align:
        eig = align_label_blocks(eig, labels, values=eig.gamma + eps)
    return labels, eig


def fit_skl_kta(data, eig, eps=DEFAULT_EPS, align=True):
    """Parameter-free spectral kernel learning.

    Learns ``lambda_bar`` from the labeled prefix of ``data`` and the
    (possibly powered) Laplacian eigensystem ``eig``.
    """
    labels, eig = _prepare(data, eig, eps, align)
    co = spectral_coefficients(eig, labels, eps)
    spectrum = lambda_bar(co)
    lab = np.arange(labels.n_l)
    coef = _spd_solve(_kernel_block(eig, spectrum, lab, lab), labels.Y)
    return SklModel(
        eig=eig,
        spectrum=spectrum,
        mode="parameter_free",
        labels=labels,
        kind="skl_kta",
        coef=coef,
        eps=eps,
        dataset_digest=dataset_digest(data),
    )


def fit_spectral(data, eig, spectrum, C, kind="spectral", mu=None, eps=DEFAULT_EPS, align=True):
    """RLS on the fixed spectral kernel ``U diag(spectrum) U^T``."""
    _check_positive(C=C)
    labels, eig = _prepare(data, eig, eps, align)
    spectrum = np.asarray(spectrum, dtype=float)
    if spectrum.shape != (eig.n,) or np.any(spectrum < 0):
        raise ArgumentError("spectrum must be a non-negative vector of length n")
    lab = np.arange(labels.n_l)
    K_ll = _kernel_block(eig, spectrum, lab, lab)
    coef = _spd_solve(K_ll + np.eye(labels.n_l) / C, labels.Y)
    return SklModel(
        eig=eig,
        spectrum=spectrum,
        mode="parametric",
        labels=labels,
        kind=kind,
        coef=coef,
        eps=eps,
        C=float(C),
        mu=None if mu is None else float(mu),
        dataset_digest=dataset_digest(data),
    )


def fit_skl(data, eig, C, mu, eps=DEFAULT_EPS, align=True):
    """Spectral kernel learning with fixed ``C`` and ``mu``."""
    _check_positive(C=C, mu=mu)
    labels, eig = _prepare(data, eig, eps, align)
    co = spectral_coefficients(eig, labels, eps)
    return fit_spectral(data, eig, lambda_star(co, mu, C), C, kind="skl", mu=mu, eps=eps, align=False)


def fit_transform(data, eig, kind, value, C=1.0, eps=DEFAULT_EPS, align=True):
    """RLS on a diffusion or Gaussian-field spectral kernel."""
    return fit_spectral(data, eig, parametric_transform(eig, kind, value), C, kind=kind, eps=eps, align=align)


def decision_function(model, query):
    query = np.asarray(query, dtype=np.int64).reshape(-1)
    if query.size and (query.min() < 0 or query.max() >= model.n):
        raise ArgumentError(f"query index outside 0 .. {model.n - 1}")
    lab = np.arange(model.n_l)
    K_ql = _kernel_block(model.eig, model.spectrum, query, lab)
    if model.mode == "parameter_free":
        K_ql = K_ql - (query[:, None] == lab[None, :])
    return K_ql @ model.coef


def predict(model, query):
    """Decision values (``len(query) x c'``) and predicted class ids.

    Binary models output one column; a value of exactly zero maps to the
    positive class. Multi-class ties go to the lowest class id.
    """
    values = decision_function(model, query)
    if model.labels.binary:
        labels = (values[:, 0] >= 0).astype(np.int64)
    else:
        labels = np.argmax(values, axis=1) if values.shape[0] else np.zeros(0, dtype=np.int64)
    return values, labels


def _sidecar(path):
    path = Path(path)
    return path.with_name(path.name + ".U.f64")


def save_model(model, path):
    """Write ``model`` as JSON plus a little-endian float64 sidecar holding ``U``."""
    path = Path(path)
    side = _sidecar(path)
    doc = {
        "n": model.n,
        "n_l": model.n_l,
        "c": model.labels.n_classes,
        "spectrum": model.spectrum.tolist(),
        "mode": model.mode,
        "eps": model.eps,
        "dataset_digest": model.dataset_digest,
        "kind": model.kind,
        "C": model.C,
        "mu": model.mu,
        "gamma": model.eig.gamma.tolist(),
        "Y_l": model.labels.Y.tolist(),
        "U_file": side.name,
    }
    path.write_text(json.dumps(doc, indent=1))
    side.write_bytes(np.ascontiguousarray(model.eig.U, dtype="<f8").tobytes(order="C"))
    return path


def load_model(path):
    path = Path(path)
    doc = json.loads(path.read_text())
    n = int(doc["n"])
    U = np.frombuffer(path.with_name(doc["U_file"]).read_bytes(), dtype="<f8")
    if U.size != n * n:
        raise ArgumentError(f"sidecar holds {U.size} values, expected {n * n}")
    eig = EigenSystem(U.reshape(n, n).astype(float), np.asarray(doc["gamma"], dtype=float))
    labels = LabelMatrix(np.asarray(doc["Y_l"], dtype=float), int(doc["c"]))
    spectrum = np.asarray(doc["spectrum"], dtype=float)
    lab = np.arange(labels.n_l)
    K_ll = _kernel_block(eig, spectrum, lab, lab)
    if doc["mode"] == "parameter_free":
        coef = _spd_solve(K_ll, labels.Y)
    else:
        coef = _spd_solve(K_ll + np.eye(labels.n_l) / doc["C"], labels.Y)
    return SklModel(
        eig=eig,
        spectrum=spectrum,
        mode=doc["mode"],
        labels=labels,
        kind=doc["kind"],
        coef=coef,
        eps=doc["eps"],
        C=doc["C"],
        mu=doc["mu"],
        dataset_digest=doc["dataset_digest"],
    )
