"""Python access to the mgcnn turning-movement forecaster."""

from ._core import (
    DataError,
    __version__,
    chebyshev_basis,
    compute_metrics,
    edge_weight,
    iqr_outlier_replace,
    largest_eigenvalue,
    normalized_laplacian,
    run_cli,
    scaled_laplacian,
    synth,
)

__all__ = [
    "DataError",
    "__version__",
    "chebyshev_basis",
    "compute_metrics",
    "edge_weight",
    "iqr_outlier_replace",
    "largest_eigenvalue",
    "normalized_laplacian",
    "run_cli",
    "scaled_laplacian",
    "synth",
]
