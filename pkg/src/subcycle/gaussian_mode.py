"""
The Gaussian wavepacket mode and its vacuum number statistics.

The mode has carrier ``omega0``, bandwidth ``sigma`` and time shift ``t0``;
every dimensionless result depends on ``r = omega0 / sigma`` only. Splitting
the mode into its positive- and negative-frequency parts,

    a_g = cosh(theta_g) a_g^(+) + sinh(theta_g) a_g^(-)dagger,

gives nonzero vacuum moments whenever ``sinh(theta_g) > 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx

from .errors import ConfigError
from .spectral import FrequencyGrid, SpectralFunction, build_grid

#: Ratio ``r = omega0/sigma`` below which a mode is labelled subcycle in reports.
SUBCYCLE_THRESHOLD = 0.5
#: Above this ratio ``sinh^2(theta_g) ~ exp(-r^2/2)`` underflows double precision.
UNDERFLOW_RATIO = 40.0
#: Default spectral cutoff, in bandwidths above the carrier.
CUTOFF_SIGMAS = 12.0
MIN_CUTOFF_SIGMAS = 10.0

_FOURTH_ROOT_2PI = (2.0 * math.pi) ** 0.25


@dataclass(frozen=True)
class GaussianModeParams:
    omega0: float
    sigma: float = 1.0
    t0: float = 0.0
    area: float = 1.0

    def __post_init__(self):
        for name in ("omega0", "sigma", "area"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        if not math.isfinite(self.t0):
            raise ConfigError("t0 must be finite")

    @property
    def r(self) -> float:
        return self.omega0 / self.sigma

    @property
    def regime(self) -> str:
        return "subcycle" if self.r < SUBCYCLE_THRESHOLD else "cycle"


@dataclass(frozen=True)
class FrequencySplit:
    """Positive/negative frequency decomposition of a mode.

    ``overlap_c`` is the commutator ``[a^(+), a^(-)dagger]``; it is reported
    as zero when the mode has no negative-frequency content.
    """

    theta_g: float
    cosh2: float
    sinh2: float
    overlap_c: complex
    underflow: bool = False

    @property
    def cross(self) -> complex:
        # int_0^inf f(w) f(-w) dw, i.e. sinh*cosh*overlap_c
        return math.sqrt(self.sinh2 * self.cosh2) * self.overlap_c


@dataclass(frozen=True)
class MomentSet:
    """Number statistics of a single bosonic mode.

    ``m`` is the anomalous moment ``<a^2>``; ``n2`` is ``<(a^dagger a)^2>``.
    """

    n: float
    m: complex
    n2: float
    var: float

    @classmethod
    def from_wick(cls, n: float, m: complex) -> "MomentSet":
        """Moments of a zero-mean Gaussian state with ``<a^dagger a> = n``, ``<a^2> = m``."""
        m2 = abs(m) ** 2
        return cls(n=n, m=complex(m), n2=m2 + 2.0 * n * n + n, var=m2 + n * n + n)

    @property
    def abs_m(self) -> float:
        return abs(self.m)


def default_grid(p: GaussianModeParams, panels: int = 64, order: int = 16,
                 cutoff_sigmas: float = CUTOFF_SIGMAS) -> FrequencyGrid:
    return build_grid(p.omega0 + cutoff_sigmas * p.sigma, panels, order)


def gaussian_amplitude(p: GaussianModeParams, omega):
    """``f_g(omega)`` for signed frequencies (no cutoff checks)."""
    w = np.asarray(omega, dtype=float)
    pref = np.sign(w) * np.sqrt(np.abs(w) / (p.omega0 * p.sigma)) / _FOURTH_ROOT_2PI
    d = w - p.omega0
    return pref * np.exp(-1j * p.t0 * d - d * d / (4.0 * p.sigma**2))


def gaussian_spectrum(p: GaussianModeParams, grid: FrequencyGrid) -> SpectralFunction:
    """Sample ``f_g(+w_k)`` and ``f_g(-w_k)`` on the grid.

    Raises
    ------
    ConfigError
        If the grid stops short of ``omega0 + 10 sigma``, where the
        neglected tail of ``|f_g|^2`` would exceed ~1e-21.
    """
    if grid.omega_max < p.omega0 + MIN_CUTOFF_SIGMAS * p.sigma * (1 - 1e-12):
        raise ConfigError(
            f"grid cutoff {grid.omega_max:g} below omega0 + {MIN_CUTOFF_SIGMAS:g} sigma"
        )
    w = grid.nodes
    return SpectralFunction(grid, gaussian_amplitude(p, w), gaussian_amplitude(p, -w))


def _sinh2_closed(r: float) -> float:
    # exp(-r^2/2) [1/(sqrt(2 pi) r) - erfcx(r/sqrt2)/2]; erf - 1 = -exp(-x^2) erfcx(x)
    # keeps the small difference accurate where erf(x) rounds to 1.
    x = r / math.sqrt(2.0)
    return math.exp(-0.5 * r * r) * (1.0 / (math.sqrt(2.0 * math.pi) * r) - 0.5 * erfcx(x))


def split_closed_form(p: GaussianModeParams) -> FrequencySplit:
    """Analytic ``theta_g`` and overlap commutator for the Gaussian mode.

    Above ``r = 40`` the negative-frequency weight underflows; the split is
    returned with ``sinh2 = 0`` and ``underflow = True``.
    """
    r = p.r
    if r > UNDERFLOW_RATIO:
        return FrequencySplit(0.0, 1.0, 0.0, 0j, underflow=True)
    sinh2 = _sinh2_closed(r)
    if sinh2 <= 0.0:
        return FrequencySplit(0.0, 1.0, 0.0, 0j, underflow=True)
    cosh2 = 1.0 + sinh2
    m = -np.exp(2j * p.t0 * p.omega0 - 0.5 * r * r) / (math.sqrt(2.0 * math.pi) * r)
    overlap = complex(m / math.sqrt(sinh2 * cosh2))
    return FrequencySplit(math.asinh(math.sqrt(sinh2)), cosh2, sinh2, overlap)


def split_from_spectrum(f: SpectralFunction) -> FrequencySplit:
    """Frequency split of an arbitrary (canonically normalized) spectrum."""
    w = f.grid.weights
    cosh2 = float(np.dot(w, np.abs(f.pos) ** 2))
    sinh2 = float(np.dot(w, np.abs(f.neg) ** 2))
    if sinh2 == 0.0:
        return FrequencySplit(0.0, cosh2, 0.0, 0j)
    cross = complex(np.dot(w, f.pos * f.neg))
    return FrequencySplit(math.asinh(math.sqrt(sinh2)), cosh2, sinh2,
                          cross / math.sqrt(cosh2 * sinh2))


def split_quadrature(p: GaussianModeParams, grid: FrequencyGrid | None = None) -> FrequencySplit:
    if grid is None:
        grid = default_grid(p)
    return split_from_spectrum(gaussian_spectrum(p, grid))


def vacuum_moments(split: FrequencySplit) -> MomentSet:
    """Vacuum moments of the mode: ``n = sinh^2``, ``m = sinh cosh c``, Wick for the rest."""
    return MomentSet.from_wick(split.sinh2, split.cross)


def second_moment_closed(p: GaussianModeParams) -> float:
    """``<n_g^2>`` in the expanded form sinh^4 + sinh^2 cosh^2 + e^{-r^2}/(2 pi r^2)."""
    s = split_closed_form(p)
    r = p.r
    return s.sinh2**2 + s.sinh2 * s.cosh2 + math.exp(-r * r) / (2.0 * math.pi * r * r)
