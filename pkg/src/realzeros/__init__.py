"""Real zeros of random algebraic polynomials with stationary Gaussian coefficients."""

__version__ = "0.1.0"

from .asymptotics import Prediction, g, predicted_total, window
from .covariance import (
    CovarianceModel,
    SpectralDensity,
    ValidationReport,
    density_from_gamma,
    gamma,
    model_from_dict,
    spectral_density,
    validate,
)
from .kac_rice import (
    PartitionReport,
    ZeroCountEstimate,
    expected_zeros,
    expected_zeros_total,
    integrand,
    partition_counts,
)
from .moments import (
    AsymptoticContext,
    MomentTriple,
    asymptotic_context,
    moments_asymptotic,
    moments_diagonal,
    moments_direct,
    moments_spectral,
)
from .simulation import (
    CoefficientSample,
    SimulationSummary,
    count_real_zeros,
    sample_coefficients,
    simulate,
)
from .sturm import sturm_count

__all__ = [
    "AsymptoticContext", "CoefficientSample", "CovarianceModel", "MomentTriple", "PartitionReport",
    "Prediction", "SimulationSummary", "SpectralDensity", "ValidationReport", "ZeroCountEstimate",
    "asymptotic_context", "count_real_zeros", "density_from_gamma", "expected_zeros",
    "expected_zeros_total", "g", "gamma", "integrand", "model_from_dict", "moments_asymptotic",
    "moments_diagonal", "moments_direct", "moments_spectral", "partition_counts", "predicted_total",
    "sample_coefficients", "simulate", "spectral_density", "sturm_count", "validate", "window",
]
