"""Finite-bin representation of a wavepacket mode.

With bin operators ``b_k = sqrt(w_k) a_{w_k}`` a mode becomes

    a_g = sum_k (alpha_k b_k + beta_k b_k^dagger),
    alpha_k = sqrt(w_k) f(+w_k),  beta_k = sqrt(w_k) f(-w_k).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceError
from ..gaussian_mode import GaussianModeParams, MomentSet, gaussian_amplitude
from ..spectral import FrequencyGrid


@dataclass(frozen=True, eq=False)
class DiscretizedMode:
    alpha: np.ndarray
    beta: np.ndarray
    grid: FrequencyGrid | None = None

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=complex))
        beta = np.atleast_1d(np.asarray(self.beta, dtype=complex))
        if alpha.shape != beta.shape or alpha.ndim != 1:
            raise ValueError("alpha and beta must be 1-D arrays of equal length")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    def __len__(self) -> int:
        return self.alpha.size

    @property
    def commutator(self) -> float:
        return float(np.sum(np.abs(self.alpha) ** 2) - np.sum(np.abs(self.beta) ** 2))

    @property
    def defect(self) -> float:
        return abs(self.commutator - 1.0)


def discretize_mode(p: GaussianModeParams, grid: FrequencyGrid, tol: float = 1e-8) -> DiscretizedMode:
    """Bin coefficients of the Gaussian mode on ``grid``.

    Raises
    ------
    ConvergenceError
        If the canonical commutator is off by more than ``tol``, typically
        because the grid truncates the spectrum.
    """
    sw = np.sqrt(grid.weights)
    mode = DiscretizedMode(sw * gaussian_amplitude(p, grid.nodes),
                           sw * gaussian_amplitude(p, -grid.nodes), grid)
    if mode.defect > tol:
        raise ConvergenceError(
            f"discretized mode commutator off by {mode.defect:.3g} (tol {tol:.3g}); "
            "extend or refine the grid"
        )
    return mode


def wick_moments_discrete(mode: DiscretizedMode) -> MomentSet:
    """Moments of the binned mode in the multimode vacuum."""
    n = float(np.sum(np.abs(mode.beta) ** 2))
    m = complex(np.sum(mode.alpha * mode.beta))
    return MomentSet.from_wick(n, m)
