"""Parameter-free spectral kernel learning for transductive classification."""

from .eigen import EigenSystem, eig_sym
from .errors import (
    ArgumentError,
    DegenerateInstanceError,
    NumericalError,
    ParseError,
    SklError,
    ValidationError,
)
from .graph import (
    Dataset,
    Graph,
    Laplacian,
    gaussian_weights,
    knn_graph,
    laplacian_power,
    load_dataset,
    manifold_regularizer,
    normalized_laplacian,
)
from .skl import (
    LabelMatrix,
    SklModel,
    SpectralCoefficients,
    fit_skl,
    fit_skl_kta,
    kta,
    lambda_bar,
    lambda_star,
    load_model,
    mu_star,
    objective_F,
    parametric_transform,
    predict,
    save_model,
    spectral_coefficients,
)

__version__ = "0.1.0"
