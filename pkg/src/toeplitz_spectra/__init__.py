"""Spectral statistics of random hermitian Toeplitz matrices."""

__version__ = "0.1.0"

from .eigensolver import SpectrumRecord, eigendecompose
from .ensemble import (
    CoefficientVector,
    EnsembleSpec,
    Symmetry,
    build_fourier_matrix,
    build_subspectrum_matrices,
    build_toeplitz,
    sample_coefficients,
    validate_fourier_variances,
    xi_eta,
)
from .spectral_stats import (
    FormFactorEstimate,
    HistogramEstimate,
    UnfoldedSpectrum,
    compressibility,
    density_estimate,
    form_factor,
    nn_spacing_distribution,
    ratio_distribution,
    unfold,
)
