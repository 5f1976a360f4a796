"""
Rapidly switched harmonic-oscillator detector and the time-energy product.

The detector (gap ``omega_u``) couples to the conjugate field through a
Gaussian switching function ``chi(t) = exp(-sigma_u^2 (t - t_u)^2)`` with peak
coupling ``lam``. To first order in the Magnus expansion the interaction is
a beamsplitter of angle

    theta_u = -(lam / 2) sqrt(omega_u / sigma_u) (pi / 2)^(1/4)

between the detector and the Gaussian mode matched to the switching.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConvergenceError
from .gaussian_mode import (
    GaussianModeParams,
    MomentSet,
    split_closed_form,
    vacuum_moments,
)

_PI2_QUARTER = (math.pi / 2.0) ** 0.25
#: Limit value of the product, in units of hbar.
LIMIT_PRODUCT = 1.0 / math.sqrt(2.0 * math.pi)
#: Detector tuning omega_u/sigma_u above which the beamsplitter picture is flagged.
MAGNUS_RATIO_THRESHOLD = 0.1

DT_CONVENTIONS = ("stddev", "fwhm")


@dataclass(frozen=True)
class DetectorParams:
    """Static detector at ``x = 0``.

    ``lam`` is stored; ``theta_u`` is derived from it. Use
    :meth:`mode_matched` to build the configuration tuned to a Gaussian mode.
    """

    omega_u: float
    sigma_u: float
    t_u: float = 0.0
    lam: float = 0.0
    area: float = 1.0

    def __post_init__(self):
        if not (self.omega_u >= 0 and math.isfinite(self.omega_u)):
            raise ConfigError(f"omega_u must be non-negative, got {self.omega_u!r}")
        if not (self.sigma_u > 0 and math.isfinite(self.sigma_u)):
            raise ConfigError(f"sigma_u must be positive, got {self.sigma_u!r}")
        if not (self.area > 0 and math.isfinite(self.area)):
            raise ConfigError(f"area must be positive, got {self.area!r}")
        if not (math.isfinite(self.lam) and math.isfinite(self.t_u)):
            raise ConfigError("lam and t_u must be finite")

    @property
    def theta_u(self) -> float:
        return -0.5 * self.lam * math.sqrt(self.omega_u / self.sigma_u) * _PI2_QUARTER

    @property
    def ratio(self) -> float:
        """Tuning ratio ``omega_u / sigma_u``."""
        return self.omega_u / self.sigma_u

    @classmethod
    def from_theta(cls, theta_u: float, omega_u: float, sigma_u: float,
                   t_u: float = 0.0, area: float = 1.0) -> "DetectorParams":
        if not omega_u > 0:
            raise ConfigError("theta_u calibration needs omega_u > 0")
        lam = -2.0 * theta_u * math.sqrt(sigma_u / omega_u) / _PI2_QUARTER
        return cls(omega_u, sigma_u, t_u, lam, area)

    @classmethod
    def mode_matched(cls, p: GaussianModeParams, theta_u: float = math.pi / 2) -> "DetectorParams":
        return cls.from_theta(theta_u, p.omega0, p.sigma, p.t0, p.area)

    def matched_mode(self) -> GaussianModeParams:
        """The Gaussian mode this detector selects."""
        return GaussianModeParams(self.omega_u, self.sigma_u, self.t_u, self.area)


def calibrate_coupling(theta_u: float, p: GaussianModeParams) -> float:
    """Peak coupling giving beamsplitter angle ``theta_u`` for a matched detector."""
    return -2.0 * theta_u * math.sqrt(p.sigma / p.omega0) / _PI2_QUARTER


def coupling_profile(d: DetectorParams, t):
    """``lam * chi(t)``."""
    t = np.asarray(t, dtype=float)
    out = d.lam * np.exp(-(d.sigma_u * (t - d.t_u)) ** 2)
    return float(out) if out.ndim == 0 else out


def coupling_weight(d: DetectorParams) -> float:
    """Time integral of ``lam * chi(t)``, i.e. ``lam sqrt(pi) / sigma_u``."""
    return d.lam * math.sqrt(math.pi) / d.sigma_u


def beamsplitter_output(theta_u: float, mode: MomentSet) -> MomentSet:
    """Detector statistics after ``u -> cos(theta) u + sin(theta) a_g``.

    The detector starts in its ground state and the field mode in a
    zero-mean Gaussian state, so the output is again zero-mean Gaussian.
    """
    s2 = math.sin(theta_u) ** 2
    return MomentSet.from_wick(s2 * mode.n, s2 * mode.m)


def interaction_duration(sigma: float, convention: str = "stddev") -> float:
    if convention == "stddev":
        return 1.0 / (math.sqrt(2.0) * sigma)
    if convention == "fwhm":
        # full width at half maximum of chi(t) = exp(-sigma^2 t^2)
        return 2.0 * math.sqrt(math.log(2.0)) / sigma
    raise ConfigError(f"unknown duration convention {convention!r}; expected one of {DT_CONVENTIONS}")


@dataclass(frozen=True)
class UncertaintyReport:
    delta_E: float
    delta_t: float
    product: float
    r: float
    dt_convention: str = "stddev"
    hbar: float = 1.0
    underflow: bool = False
    detector: MomentSet | None = field(default=None, compare=False)


def uncertainty_product(p: GaussianModeParams, dt_convention: str = "stddev",
                        hbar: float = 1.0, theta_u: float = math.pi / 2) -> UncertaintyReport:
    """Energy spread of the detector times the interaction duration.

    ``delta_E = hbar omega0 * std(n')`` for the detector after the
    beamsplitter; at ``theta_u = pi/2`` this is the number spread of the mode.
    """
    if not hbar > 0:
        raise ConfigError(f"hbar must be positive, got {hbar!r}")
    split = split_closed_form(p)
    out = beamsplitter_output(theta_u, vacuum_moments(split))
    delta_E = hbar * p.omega0 * math.sqrt(out.var)
    delta_t = interaction_duration(p.sigma, dt_convention)
    return UncertaintyReport(delta_E, delta_t, delta_E * delta_t, p.r, dt_convention,
                             hbar, split.underflow, out)


def product_terms(p: GaussianModeParams) -> tuple[float, float]:
    """The two summands of the squared product at ``theta_u = pi/2``, ``hbar = 1``.

    ``(r^2/2) sinh^2 cosh^2`` and ``exp(-r^2) / (4 pi)``.
    """
    s = split_closed_form(p)
    r = p.r
    return 0.5 * r * r * s.sinh2 * s.cosh2, math.exp(-r * r) / (4.0 * math.pi)


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    residual: float
    ladder: tuple
    products: tuple


def _neville_at_zero(xs, ys) -> float:
    p = list(ys)
    n = len(xs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i])
    return p[0]


def subcycle_limit(ladder=(1e-2, 1e-3, 1e-4), tol: float = 1e-6, hbar: float = 1.0,
                   extrapolate: bool = True) -> LimitEstimate:
    """Estimate the product as ``r -> 0+`` by polynomial extrapolation.

    The product is evaluated on ``ladder`` and the interpolating polynomial
    in ``r`` is evaluated at zero. ``residual`` compares that value with the
    extrapolation that drops the coarsest point.

    Raises
    ------
    ConfigError
        Empty ladder, non-positive or repeated points.
    ConvergenceError
        ``residual > tol``.
    """
    rs = tuple(float(r) for r in ladder)
    if not rs:
        raise ConfigError("ladder must not be empty")
    if any(not r > 0 for r in rs):
        raise ConfigError("ladder points must be positive")
    if len(set(rs)) != len(rs):
        raise ConfigError("ladder points must be distinct")
    products = tuple(
        uncertainty_product(GaussianModeParams(omega0=r), hbar=hbar).product for r in rs
    )
    if not extrapolate or len(rs) == 1:
        i = int(np.argmin(rs))
        return LimitEstimate(products[i], math.nan, rs, products)

    order = np.argsort(rs)[::-1]  # coarse to fine
    xs = [rs[i] for i in order]
    ys = [products[i] for i in order]
    value = _neville_at_zero(xs, ys)
    residual = abs(value - _neville_at_zero(xs[1:], ys[1:]))
    if residual > tol:
        raise ConvergenceError(f"limit extrapolation residual {residual:.3g} exceeds {tol:.3g}")
    return LimitEstimate(value, residual, rs, products)


@dataclass(frozen=True)
class MagnusDiagnostic:
    ratio: float
    status: str
    note: str = ""


def magnus_validity(d: DetectorParams, threshold: float = MAGNUS_RATIO_THRESHOLD) -> MagnusDiagnostic:
    """Advisory check of the rapid-switching condition ``sigma_u >> omega_u``.

    Only the tuning ratio is inspected; whether the first Magnus term is
    actually accurate is measured by :func:`subcycle.dynamics.magnus_comparison`.
    """
    ratio = d.ratio
    if ratio == 0.0:
        return MagnusDiagnostic(0.0, "pass", "zero gap: delta-switching limit")
    if ratio <= threshold:
        return MagnusDiagnostic(ratio, "pass")
    return MagnusDiagnostic(ratio, "warn", f"omega_u/sigma_u = {ratio:.3g} > {threshold:g}")
