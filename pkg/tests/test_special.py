"""Lanczos complex log-gamma against the scipy reference."""

import numpy as np
from scipy.special import loggamma as scipy_loggamma

from hyperball.special import lanczos_loggamma


def _domain_points():
    lams = np.concatenate([np.linspace(1e-3, 80.0, 61), [2e2, 1e3, 1e5, 1e7]])
    zs = []
    for lam in lams:
        zs.append(1j * lam)                 # Gamma(i lam)
        zs.append((1.0 + 1j * lam) / 2.0)   # Gamma((1+i lam)/2)
        for n in (2, 3, 4, 6, 7, 8, 10):
            zs.append((n - 1 + 1j * lam) / 2.0)
    return np.array(zs)


def test_matches_scipy_on_used_domain():
    z = _domain_points()
    ours = lanczos_loggamma(z)
    ref = scipy_loggamma(z)
    # compare exp of the difference: insensitive to 2*pi*i branch offsets
    rel = np.abs(np.exp(ours - ref) - 1.0)
    assert np.max(rel) < 1e-12


def test_real_axis_values():
    assert abs(np.exp(lanczos_loggamma(5.0)) - 24.0) < 1e-12 * 24.0
    assert abs(np.exp(lanczos_loggamma(0.5)) - np.sqrt(np.pi)) < 1e-13


def test_reflection_region():
    # arguments with real part < 1/2 go through the reflection branch
    z = np.array([0.25 + 3.0j, -0.75 + 11.0j, 0.1 - 40.0j])
    rel = np.abs(np.exp(lanczos_loggamma(z) - scipy_loggamma(z)) - 1.0)
    assert np.max(rel) < 1e-12
