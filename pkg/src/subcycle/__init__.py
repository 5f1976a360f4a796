"""Subcycle vacuum wavepacket modes, a switched oscillator detector and the time-energy product."""
from .detector import (
    LIMIT_PRODUCT,
    DetectorParams,
    UncertaintyReport,
    beamsplitter_output,
    calibrate_coupling,
    magnus_validity,
    subcycle_limit,
    uncertainty_product,
)
from .errors import ConfigError, ConvergenceError, SubcycleError
from .gaussian_mode import (
    FrequencySplit,
    GaussianModeParams,
    MomentSet,
    gaussian_spectrum,
    split_closed_form,
    split_quadrature,
    vacuum_moments,
)
from .spectral import FrequencyGrid, SpectralFunction, build_grid, mode_norm, signed_inner_product

__version__ = "0.1.0"

__all__ = [
    "LIMIT_PRODUCT", "DetectorParams", "UncertaintyReport", "beamsplitter_output",
    "calibrate_coupling", "magnus_validity", "subcycle_limit", "uncertainty_product",
    "ConfigError", "ConvergenceError", "SubcycleError",
    "FrequencySplit", "GaussianModeParams", "MomentSet", "gaussian_spectrum",
    "split_closed_form", "split_quadrature", "vacuum_moments",
    "FrequencyGrid", "SpectralFunction", "build_grid", "mode_norm", "signed_inner_product",
]
