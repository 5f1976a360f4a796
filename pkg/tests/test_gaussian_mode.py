import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erf

from subcycle.errors import ConfigError
from subcycle.gaussian_mode import (
    GaussianModeParams,
    MomentSet,
    gaussian_spectrum,
    second_moment_closed,
    split_closed_form,
    split_quadrature,
    vacuum_moments,
)
from subcycle.spectral import build_grid

# Independent values from mpmath quadrature at 40 digits:
# r -> (cosh2, sinh2, overlap_c, |m|, n2, var)
ORACLE = {
    0.01: (40.396222734922846, 39.396222734922846, -0.99997854002779612,
           39.892233378608215, 4734.9112382275697, 3182.848872447918),
    0.1: (4.5093533120471466, 3.5093533120471466, -0.99785609506130458,
          3.9695254747701177, 43.89760714444863, 31.582046475672352),
    1.0: (1.0833154705876863, 0.083315470587686298, -0.80542021643142093,
          0.24197072451914335, 0.1557482373905007, 0.14880676975125308),
}
SMALL_SINH2 = {5.0: 1.069233106766563e-8, 10.0: 7.474560254589328e-26}
SMALL_OVERLAP = {5.0: -0.0028755626675271341, 10.0: -2.8144474688948468e-11}

ERF_REF = {
    0.1: 0.112462916018284892203275071744,
    0.5: 0.520499877813046537682746653892,
    1.0: 0.842700792949714869341220635083,
    2.5: 0.99959304798255504106043578426,
    4.0: 0.99999998458274209971998114784,
}


@pytest.mark.parametrize("x", sorted(ERF_REF))
def test_erf_reference(x):
    assert erf(x) == pytest.approx(ERF_REF[x], rel=1e-15)


@pytest.mark.parametrize("r", sorted(ORACLE))
def test_closed_form_against_oracle(r):
    cosh2, sinh2, overlap, abs_m, n2, var = ORACLE[r]
    s = split_closed_form(GaussianModeParams(omega0=r))
    assert s.cosh2 == pytest.approx(cosh2, rel=1e-13)
    assert s.sinh2 == pytest.approx(sinh2, rel=1e-13)
    assert s.overlap_c.real == pytest.approx(overlap, rel=1e-12)
    mom = vacuum_moments(s)
    assert mom.abs_m == pytest.approx(abs_m, rel=1e-12)
    assert mom.n2 == pytest.approx(n2, rel=1e-12)
    assert mom.var == pytest.approx(var, rel=1e-12)


@pytest.mark.parametrize("r", sorted(SMALL_SINH2))
def test_small_negative_weight(r):
    s = split_closed_form(GaussianModeParams(omega0=r))
    assert s.sinh2 == pytest.approx(SMALL_SINH2[r], rel=1e-11)
    assert s.overlap_c.real == pytest.approx(SMALL_OVERLAP[r], rel=1e-9)
    assert not s.underflow


def test_r_one_anchor_values():
    s = split_closed_form(GaussianModeParams(omega0=1.0))
    assert s.sinh2 == pytest.approx(0.0833154, abs=1e-7)
    assert s.overlap_c.real == pytest.approx(-0.805420, abs=1e-6)


def test_underflow_flag():
    s = split_closed_form(GaussianModeParams(omega0=50.0))
    assert s.underflow and s.sinh2 == 0.0 and s.theta_g == 0.0


def test_time_shift_phase():
    s = split_closed_form(GaussianModeParams(omega0=1.0, t0=0.3))
    m = vacuum_moments(s).m
    want = -cmath.exp(0.6j - 0.5) / math.sqrt(2 * math.pi)
    assert m == pytest.approx(complex(-0.19970705671114755, -0.13662694838167782), abs=1e-15)
    assert abs(m - want) < 1e-15


@pytest.mark.parametrize("r", [0.01, 0.1, 1.0, 5.0, 10.0])
def test_quadrature_matches_closed_form(r):
    p = GaussianModeParams(omega0=r)
    q, c = split_quadrature(p), split_closed_form(p)
    assert abs(q.sinh2 - c.sinh2) <= 1e-8
    assert abs(q.cosh2 - c.cosh2) <= 1e-8
    assert abs(q.cross - c.cross) <= 1e-8
    assert abs(q.cosh2 - q.sinh2 - 1.0) <= 1e-12


def test_spectrum_requires_wide_grid():
    p = GaussianModeParams(omega0=1.0)
    with pytest.raises(ConfigError):
        gaussian_spectrum(p, build_grid(3.0, 8, 8))


@pytest.mark.parametrize("field,value", [("omega0", 0.0), ("sigma", -1.0), ("area", math.nan)])
def test_params_validation(field, value):
    kw = {"omega0": 1.0, field: value}
    with pytest.raises(ConfigError):
        GaussianModeParams(**kw)


def test_regime_labels():
    assert GaussianModeParams(omega0=0.1).regime == "subcycle"
    assert GaussianModeParams(omega0=5.0).regime == "cycle"


def test_wick_single_mode():
    # sinh^2 s = 1: n = 1, |m|^2 = 2, n2 = 5, var = 4
    m = MomentSet.from_wick(1.0, math.sqrt(2.0))
    assert (m.n2, m.var) == pytest.approx((5.0, 4.0))


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, 30.0), st.floats(0.2, 5.0), st.floats(-5.0, 5.0), st.floats(0.1, 10.0))
def test_dimensionless_and_bounded(r, sigma, t0, area):
    base = split_closed_form(GaussianModeParams(omega0=r))
    s = split_closed_form(GaussianModeParams(omega0=r * sigma, sigma=sigma, t0=t0, area=area))
    assert s.sinh2 == pytest.approx(base.sinh2, rel=1e-12)
    assert abs(s.overlap_c) <= 1.0 + 1e-15
    assert abs(abs(s.overlap_c) - abs(base.overlap_c)) <= 1e-12
    assert s.cosh2 - s.sinh2 == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(-4.0, 4.0))
def test_t0_phase_covariance(r, t0):
    m0 = vacuum_moments(split_closed_form(GaussianModeParams(omega0=r))).m
    m1 = vacuum_moments(split_closed_form(GaussianModeParams(omega0=r, t0=t0))).m
    assert abs(m1 - m0 * cmath.exp(2j * r * t0)) <= 1e-12 * max(1.0, abs(m0))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 8.0))
def test_second_moment_expanded_form(r):
    p = GaussianModeParams(omega0=r)
    n2 = vacuum_moments(split_closed_form(p)).n2
    assert second_moment_closed(p) == pytest.approx(n2, rel=1e-11, abs=1e-300)


def test_sinh2_monotone_in_r():
    vals = [split_closed_form(GaussianModeParams(omega0=r)).sinh2 for r in np.geomspace(1e-3, 30, 60)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
