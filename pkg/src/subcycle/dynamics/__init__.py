"""Brute-force engines: binned modes, truncated Fock space, exact Gaussian dynamics."""
from .discrete import DiscretizedMode, discretize_mode, wick_moments_discrete
from .fock import FockOperatorSet, fock_brute_force, fock_evolve_detector
from .symplectic import (
    Evolution,
    GaussianState,
    MagnusDeviation,
    dynamics_grid,
    evolve_converged,
    evolve_symplectic,
    magnus_comparison,
    magnus_ladder,
    self_interaction_shear,
    static_detector_covariance,
    step_factors,
    symplectic_form,
)

__all__ = [
    "DiscretizedMode", "discretize_mode", "wick_moments_discrete",
    "FockOperatorSet", "fock_brute_force", "fock_evolve_detector",
    "Evolution", "GaussianState", "MagnusDeviation", "dynamics_grid", "evolve_converged",
    "evolve_symplectic", "magnus_comparison", "magnus_ladder", "self_interaction_shear",
    "static_detector_covariance", "step_factors", "symplectic_form",
]
