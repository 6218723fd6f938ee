"""Complex log-gamma via the Lanczos series (g = 7, 9 terms).

Only the gamma-quotient combinations appearing in the Harish-Chandra function
are consumed downstream, so everything is kept in log space: the individual
factors over/underflow along the imaginary axis long before the combination
does.  Reflection covers Re z < 1/2 (the Gamma(i*lambda) factor lives there).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["lanczos_loggamma"]

_LANCZOS_G = 7.0
_LANCZOS_C = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])

_HALF_LOG_2PI = 0.9189385332046727  # log(2*pi)/2
_LOG_PI = 1.1447298858494002


def _loggamma_right(z: np.ndarray) -> np.ndarray:
    """Lanczos series, valid for Re z >= 1/2."""
    acc = np.full_like(z, _LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[k] / (z - 1.0 + k)
    t = z + (_LANCZOS_G - 0.5)
    return _HALF_LOG_2PI + (z - 0.5) * np.log(t) - t + np.log(acc)


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    """log(sin(pi z)) without overflow for large |Im z|."""
    # sin(pi z) = (e^{i pi z} - e^{-i pi z}) / (2i); factor out the growing half:
    # = -e^{-i pi z}(1 - e^{2 i pi z})/(2i)  for Im z >= 0,
    # =  e^{ i pi z}(1 - e^{-2 i pi z})/(2i) for Im z < 0.
    iz = 1j * np.pi * z
    out = np.empty_like(z)
    up = np.imag(z) >= 0
    out[up] = -iz[up] + np.log1p(-np.exp(2.0 * iz[up])) + (0.5j * np.pi - math.log(2.0))
    out[~up] = iz[~up] + np.log1p(-np.exp(-2.0 * iz[~up])) - (math.log(2.0) + 0.5j * np.pi)
    return out


def lanczos_loggamma(z) -> np.ndarray:
    """log Gamma(z) for complex z (any branch differing by 2*pi*i is fine).

    Relative accuracy of exp(result) is ~1e-13 on the strip used by the
    Harish-Chandra function; poles (z a nonpositive integer) are not handled.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    right = np.real(z) >= 0.5
    if np.any(right):
        out[right] = _loggamma_right(z[right])
    if np.any(~right):
        zl = z[~right]
        # reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
        out[~right] = _LOG_PI - _log_sin_pi(zl) - _loggamma_right(1.0 - zl)
    return out[0] if scalar else out
