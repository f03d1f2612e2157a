"""Tridiagonal beta-ensembles as weighted rooted graphs: spectra, local limits and diagnostics."""

__version__ = "0.1.0"

from .ensembles import EnsembleKind, EnsembleParams, LimitWeights, TridiagonalMatrix  # noqa: E402
from .sampling import RngStream  # noqa: E402
from .spectral import PointMeasure, eigenvalues, expected_spectral_measure, spectral_measure_at_root  # noqa: E402

__all__ = [
    "EnsembleKind", "EnsembleParams", "LimitWeights", "TridiagonalMatrix", "RngStream",
    "PointMeasure", "eigenvalues", "expected_spectral_measure", "spectral_measure_at_root",
]
