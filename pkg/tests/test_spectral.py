"""Radial transform analysis: c-function, spherical functions, transforms, multipliers."""

import math

import numpy as np
import pytest

from hyperball.grids import RadialProfile, frequency_grid, transform_grid
from hyperball.spectral import (RadialTransformer, TailDecayError, abs_c_inverse_sq,
                                gk_multiplier, harish_chandra_c, normalization_selftest,
                                phi_row, pk_multiplier, plancherel_density, poincare_alpha,
                                spherical_function)
from conftest import make_transformer


# -- Harish-Chandra function -------------------------------------------------

def test_c_inverse_square_n3_law():
    # duplication identity reduces c to 2/(i lam) at n = 3
    for lam in (0.5, 1.0, 2.0, 7.0):
        assert abs(abs_c_inverse_sq(lam, 3) - lam ** 2 / 4.0) < 1e-10 * (lam ** 2 / 4.0)


def test_c_n3_value_and_phase():
    c = harish_chandra_c(2.0, 3)
    assert abs(c - 2.0 / (2.0j)) < 1e-12


def test_c_conjugate_symmetry():
    for n in (3, 4, 6):
        for lam in (0.7, 3.0, 11.0):
            assert abs(abs(harish_chandra_c(-lam, n)) - abs(harish_chandra_c(lam, n))) < 1e-12


def test_c_pole_at_zero():
    with pytest.raises(ValueError):
        harish_chandra_c(0.0, 3)


# -- Plancherel density -------------------------------------------------------

def test_plancherel_density_n3_value():
    assert abs(plancherel_density(1.0, 3) - 1.0 / (4.0 * math.pi)) < 1e-12


def test_plancherel_density_vanishes_at_zero():
    vals = [plancherel_density(lam, 4) for lam in (1e-2, 1e-3, 1e-4)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-7
    # quadratic vanishing: density / lam^2 approaches a finite limit
    ratio = [plancherel_density(lam, 4) / lam ** 2 for lam in (1e-3, 1e-4, 1e-5)]
    assert abs(ratio[1] / ratio[2] - 1.0) < 1e-3


def test_plancherel_density_increasing_n3():
    lams = np.linspace(0.1, 20.0, 100)
    vals = plancherel_density(lams, 3)
    assert np.all(np.diff(vals) > 0)


def test_density_rejects_nonpositive():
    with pytest.raises(ValueError):
        plancherel_density(0.0, 3)
    with pytest.raises(ValueError):
        plancherel_density(-1.0, 3)


# -- spherical functions ------------------------------------------------------

def test_spherical_function_at_origin():
    for n in (3, 6):
        assert spherical_function(2.7, 0.0, n) == 1.0


def test_spherical_function_even_in_lambda(rng):
    for n in (3, 6):
        for _ in range(50):
            lam = rng.uniform(0.1, 8.0)
            rho = rng.uniform(0.05, 4.0)
            a = spherical_function(lam, rho, n)
            b = spherical_function(-lam, rho, n)
            assert abs(a - b) < 1e-8


def test_spherical_function_n3_closed_form(rng):
    for _ in range(40):
        lam = rng.uniform(0.1, 10.0)
        rho = rng.uniform(0.05, 5.0)
        closed = 2.0 * math.sin(lam * rho / 2.0) / (lam * math.sinh(rho))
        assert abs(spherical_function(lam, rho, 3) - closed) < 1e-10


def test_phi_row_matches_theta_form(rng):
    # the substituted Gauss-Jacobi form equals the theta-integral form
    for n in (3, 4, 6, 8):
        for _ in range(12):
            lam = rng.uniform(0.2, 12.0)
            rho = rng.uniform(0.05, 4.0)
            assert abs(phi_row(np.array([lam]), rho, n)[0]
                       - spherical_function(lam, rho, n)) < 1e-10


def test_spherical_function_bounded(transformer4):
    phi = transformer4.phi
    assert np.all(phi <= 1.0 + 1e-12)
    assert np.all(phi >= -1.0 - 1e-12)


def test_imaginary_part_check_raises():
    # extreme lam*rho makes the fixed-order theta rule inadequate
    with pytest.raises(ValueError):
        spherical_function(40.0, 14.0, 6, order=64)


# -- transforms ---------------------------------------------------------------

def test_forward_zero_profile(transformer3):
    tr = transformer3
    F = tr.forward(RadialProfile(tr.grid, np.zeros_like(tr.grid.rho)))
    assert np.all(F.values == 0.0)


def test_forward_linearity(transformer3):
    tr = transformer3
    f = np.exp(-tr.grid.rho ** 2)
    g = np.exp(-2.0 * tr.grid.rho ** 2) * tr.grid.rho ** 2
    a, b = 1.7, -0.4
    lhs = tr.forward(RadialProfile(tr.grid, a * f + b * g)).values
    rhs = a * tr.forward(RadialProfile(tr.grid, f)).values \
        + b * tr.forward(RadialProfile(tr.grid, g)).values
    scale = np.max(np.abs(rhs))
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * scale


def test_forward_rejects_heavy_tail(transformer3):
    tr = transformer3
    with pytest.raises(TailDecayError):
        tr.forward(RadialProfile(tr.grid, np.exp(-0.05 * tr.grid.rho)))


@pytest.mark.parametrize("n", [3, 4, 6])
def test_plancherel_identity_gaussians(n):
    tr = make_transformer(n)
    for a in (0.5, 1.0, 2.0):
        f = RadialProfile(tr.grid, np.exp(-a * tr.grid.rho ** 2))
        F = tr.forward(f)
        lhs = f.l2_norm() ** 2
        assert abs(lhs - F.norm_sq()) / lhs < 1e-6


@pytest.mark.parametrize("n", [3, 4, 6])
def test_roundtrip_gaussians(n):
    tr = make_transformer(n)
    w = tr.grid.volume_weights
    for a in (0.5, 1.0, 2.0):
        f = RadialProfile(tr.grid, np.exp(-a * tr.grid.rho ** 2))
        g = tr.inverse(tr.forward(f))
        err = math.sqrt(float(np.sum(w * (g.values - f.values) ** 2))) / f.l2_norm()
        assert err < 1e-6


def test_plancherel_sech_family(transformer6):
    tr = transformer6
    f = RadialProfile(tr.grid, np.cosh(tr.grid.rho) ** (-6.0))
    F = tr.forward(f)
    assert abs(f.l2_norm() ** 2 - F.norm_sq()) / f.l2_norm() ** 2 < 1e-6


def test_inverse_zero(transformer3):
    tr = transformer3
    F = tr.forward(RadialProfile(tr.grid, np.zeros_like(tr.grid.rho)))
    assert np.all(tr.inverse(F).values == 0.0)


def test_inverse_narrowband_is_spherical_function(transformer3):
    tr = transformer3
    lam0 = 4.0
    dens = tr.forward(RadialProfile(tr.grid, np.exp(-tr.grid.rho ** 2)))
    dens.values = np.exp(-((tr.freq.lambdas - lam0) / 0.15) ** 2)
    prof = tr.inverse(dens, check_tail=False)
    phi = phi_row(np.array([lam0]), 0.0, 3)  # ensure import path used
    phi = np.array([phi_row(np.array([lam0]), r, 3)[0] for r in tr.grid.rho])
    w = tr.grid.volume_weights * np.exp(-tr.grid.rho)  # damp the far tail in the score
    corr = np.sum(w * prof.values * phi) / math.sqrt(np.sum(w * prof.values ** 2) * np.sum(w * phi ** 2))
    assert corr > 0.999


def test_normalization_selftest_all_dims():
    for n in (3, 4, 6, 7, 8):
        assert normalization_selftest(n) < 1e-7


# -- multipliers ---------------------------------------------------------------

def test_pk_multiplier_values():
    assert abs(pk_multiplier(0.0, 1) - 0.25) < 1e-15
    lam = np.array([0.3, 1.0, 5.0])
    assert np.allclose(pk_multiplier(lam, 1), (lam ** 2 + 1) / 4.0, rtol=0, atol=1e-15)
    assert abs(pk_multiplier(1.0, 2) - 1.25) < 1e-15


def test_gk_multiplier_values():
    for k in (1, 2, 3, 4):
        assert abs(gk_multiplier(0.0, k, 1.0)) < 1e-13
    assert np.allclose(gk_multiplier(np.array([0.5, 2.0]), 1, 1.0),
                       np.array([0.5, 2.0]) ** 2 / 4.0, atol=1e-15)
    assert abs(gk_multiplier(1.0, 2, 1.0) - 11.0 / 16.0) < 1e-15


def test_gk_multiplier_positive_off_zero():
    lam = np.linspace(1e-3, 50.0, 4000)
    for k in range(1, 7):
        assert np.all(gk_multiplier(lam, k, 1.0) > 0.0)


def test_gk_multiplier_negative_power_guard():
    with pytest.raises(ValueError):
        gk_multiplier(np.array([0.0, 1.0]), 2, -1.0)


def test_alpha_values():
    assert poincare_alpha(1) == 0.25
    assert poincare_alpha(2) == 9.0 / 16.0
    assert abs(poincare_alpha(3) - 225.0 / 64.0) < 1e-15
