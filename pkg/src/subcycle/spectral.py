"""
Signed-frequency grids and the spectral algebra of wavepacket modes.

A wavepacket mode operator is written as an integral over monochromatic
operators, ``a_f = int dw f(w) a_w`` over the whole real line, with the
convention ``a_{-w} = a_w^dagger``.  All spectra in this package are stored
on a grid of positive frequencies ``w_k`` as the pair ``(f(+w_k), f(-w_k))``.

Frequencies are in units of the mode bandwidth (sigma = 1) unless a caller
chooses otherwise; nothing here depends on that choice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Composite Gauss-Legendre rule on ``[0, omega_max]``.

    Nodes are interior points of each panel, so ``w = 0`` is never sampled.
    """

    nodes: np.ndarray
    weights: np.ndarray
    omega_max: float
    panels: int = 0
    order: int = 0

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise ConfigError("nodes and weights must be 1-D arrays of equal length")
        if np.any(np.diff(self.nodes) <= 0):
            raise ConfigError("grid nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise ConfigError("quadrature weights must be positive")
        if self.nodes.size and self.omega_max < self.nodes[-1]:
            raise ConfigError("omega_max must bound the nodes")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray):
        """Apply the rule to samples taken at the grid nodes."""
        return np.dot(self.weights, values)

    def same_as(self, other: "FrequencyGrid") -> bool:
        return self is other or (
            np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )


def build_grid(omega_max: float, panels: int, order: int) -> FrequencyGrid:
    """Build a composite ``order``-point Gauss-Legendre rule.

    The interval ``[0, omega_max]`` is split into ``panels`` equal panels. The
    result is deterministic for equal inputs.

    Raises
    ------
    ConfigError
        If ``omega_max <= 0``, ``panels < 1`` or ``order < 2``.
    """
    if not omega_max > 0 or not np.isfinite(omega_max):
        raise ConfigError(f"omega_max must be positive and finite, got {omega_max!r}")
    if int(panels) != panels or panels < 1:
        raise ConfigError(f"panels must be a positive integer, got {panels!r}")
    if int(order) != order or order < 2:
        raise ConfigError(f"order must be an integer >= 2, got {order!r}")

    x, w = np.polynomial.legendre.leggauss(int(order))
    edges = np.linspace(0.0, float(omega_max), int(panels) + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (half * x + 0.5 * (lo + hi)).ravel()
    weights = (half * w).ravel()
    return FrequencyGrid(nodes, weights, float(omega_max), int(panels), int(order))


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """Complex spectrum sampled at ``+w_k`` (``pos``) and ``-w_k`` (``neg``)."""

    grid: FrequencyGrid
    pos: np.ndarray
    neg: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.pos, dtype=complex)
        neg = np.asarray(self.neg, dtype=complex)
        n = len(self.grid)
        if pos.shape != (n,) or neg.shape != (n,):
            raise ConfigError("pos/neg must have one entry per grid node")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(neg))):
            raise ConfigError("spectral samples must be finite")
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "neg", neg)

    def positive_part(self) -> "SpectralFunction":
        return SpectralFunction(self.grid, self.pos, np.zeros_like(self.neg))

    def negative_part(self) -> "SpectralFunction":
        return SpectralFunction(self.grid, np.zeros_like(self.pos), self.neg)

    def scaled(self, factor: complex) -> "SpectralFunction":
        return SpectralFunction(self.grid, factor * self.pos, factor * self.neg)


@dataclass(frozen=True)
class ModeNorm:
    norm: float
    tolerance_used: float

    @property
    def canonical(self) -> bool:
        return abs(self.norm - 1.0) <= self.tolerance_used


def _check_same_grid(f: SpectralFunction, g: SpectralFunction):
    if not f.grid.same_as(g.grid):
        raise ConfigError("spectral functions live on different grids")


def signed_inner_product(f: SpectralFunction, g: SpectralFunction) -> complex:
    """Commutator ``[a_f, a_g^dagger]`` of the two mode operators.

    ``int_0^inf (f(w) g*(w) - f(-w) g*(-w)) dw`` evaluated on the shared grid.
    """
    _check_same_grid(f, g)
    w = f.grid.weights
    return complex(np.dot(w, f.pos * np.conj(g.pos)) - np.dot(w, f.neg * np.conj(g.neg)))


def mode_norm(f: SpectralFunction, tol: float = 1e-10) -> ModeNorm:
    return ModeNorm(signed_inner_product(f, f).real, tol)


def synthesize_profile(f: SpectralFunction, area: float, t_minus_x):
    """Spacetime profile ``u(t, x)`` of the mode, as a function of ``t - x``.

    Sums ``u_w(t, x) f*(w) sign(w)`` over both signs of frequency, with
    ``u_w = exp(-i w (t - x)) / sqrt(4 pi |w| A)``. Accepts a scalar or an
    array of ``t - x`` values.
    """
    if not area > 0:
        raise ConfigError(f"area must be positive, got {area!r}")
    w = f.grid.nodes
    amp = f.grid.weights / np.sqrt(4.0 * np.pi * w * area)
    s = np.asarray(t_minus_x, dtype=float)
    phase = np.exp(-1j * np.multiply.outer(s, w))
    out = phase @ (amp * np.conj(f.pos)) - np.conj(phase) @ (amp * np.conj(f.neg))
    return complex(out) if out.ndim == 0 else out
