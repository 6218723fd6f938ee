"""Poincare ball primitives.

The unit ball carries the metric (2/(1-|x|^2))^2 times the Euclidean one, so
the volume element is dV = (2/(1-|x|^2))^n dx.  The natural radial coordinate
is the geodesic distance rho from the origin; the Euclidean radius of the
geodesic sphere of radius rho is r = tanh(rho/2).  All radial quadratures in
this package are carried out in rho, where the volume density is
omega(n) * sinh(rho)^(n-1) and nothing blows up near the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = [
    "BallPoint",
    "GeodesicRadius",
    "sphere_area",
    "mobius_transform",
    "geodesic_distance",
    "pairwise_distance",
    "conformal_factor",
    "ball_volume",
    "ball_volume_inverse",
    "conformal_pushforward",
    "euclidean_radius",
    "geodesic_radius_from_euclidean",
]

# Points this close to the boundary are rejected rather than clamped; a
# silently clamped point would corrupt every distance downstream.
BOUNDARY_GUARD = 1e-12


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^(n-1) in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class BallPoint:
    """A point strictly inside the unit ball of R^n."""

    coords: np.ndarray
    n: int

    @staticmethod
    def of(coords) -> "BallPoint":
        c = np.asarray(coords, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("a ball point needs a 1-d coordinate vector with n >= 2")
        r = float(np.linalg.norm(c))
        if r > 1.0 - BOUNDARY_GUARD:
            raise ValueError(f"point with |x| = {r!r} is not strictly inside the unit ball")
        return BallPoint(coords=c, n=c.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


@dataclass(frozen=True)
class GeodesicRadius:
    """Nonnegative geodesic distance from the origin."""

    rho: float

    def __post_init__(self):
        if not (self.rho >= 0.0):
            raise ValueError(f"geodesic radius must be >= 0, got {self.rho!r}")

    @property
    def euclidean(self) -> float:
        """Euclidean radius of the geodesic sphere, r = tanh(rho/2)."""
        return math.tanh(self.rho / 2.0)


def euclidean_radius(rho):
    """r = tanh(rho/2), vectorized."""
    return np.tanh(np.asarray(rho, dtype=float) / 2.0)


def geodesic_radius_from_euclidean(r):
    """rho = log((1+r)/(1-r)), vectorized; the inverse of euclidean_radius."""
    r = np.asarray(r, dtype=float)
    return np.log1p(r) - np.log1p(-r)


def _as_point(x) -> BallPoint:
    return x if isinstance(x, BallPoint) else BallPoint.of(x)


def mobius_transform(a, x) -> BallPoint:
    """Apply the Mobius self-map of the ball determined by a.

    T_a(x) = (|x-a|^2 a - (1-|a|^2)(x-a)) / (1 - 2 x.a + |x|^2 |a|^2);
    T_a moves a to the origin, fixes the ball and preserves the hyperbolic
    metric and measure.
    """
    a = _as_point(a)
    x = _as_point(x)
    if a.n != x.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {x.n}")
    av, xv = a.coords, x.coords
    diff = xv - av
    na2 = float(av @ av)
    denom = 1.0 - 2.0 * float(xv @ av) + float(xv @ xv) * na2
    num = float(diff @ diff) * av - (1.0 - na2) * diff
    return BallPoint.of(num / denom)


def _mobius_norm_sq(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """|T_y(x)|^2 for broadcast arrays of points (last axis = coordinates)."""
    d2 = np.sum((x - y) ** 2, axis=-1)
    denom = 1.0 - 2.0 * np.sum(x * y, axis=-1) \
        + np.sum(x * x, axis=-1) * np.sum(y * y, axis=-1)
    return d2 / denom


def geodesic_distance(x, y) -> GeodesicRadius:
    """Hyperbolic distance rho(x, y) = log((1+|T_y(x)|)/(1-|T_y(x)|))."""
    x = _as_point(x)
    y = _as_point(y)
    if x.n != y.n:
        raise ValueError(f"dimension mismatch: {x.n} vs {y.n}")
    t2 = _mobius_norm_sq(x.coords, y.coords)
    t = math.sqrt(max(float(t2), 0.0))
    if t >= 1.0:
        raise ValueError("distance argument escaped the ball (inputs too close to boundary)")
    return GeodesicRadius(float(np.log1p(t) - np.log1p(-t)))


def pairwise_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized rho(x_i, y_i) for arrays of shape (..., n)."""
    t = np.sqrt(np.clip(_mobius_norm_sq(np.asarray(x), np.asarray(y)), 0.0, None))
    return np.log1p(t) - np.log1p(-t)


def conformal_factor(x) -> float:
    """Metric factor 2/(1-|x|^2) at a ball point."""
    x = _as_point(x)
    return 2.0 / (1.0 - x.norm ** 2)


def ball_volume(n: int, r) -> float:
    """Hyperbolic volume of the geodesic ball of radius r about the origin.

    Integrates omega(n) * sinh(rho)^(n-1) over [0, r] with adaptive
    Gauss-Kronrod quadrature; the Euclidean-radius integrand
    (2/(1-s^2))^n s^(n-1) is the same measure but degenerates near s = 1.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    rho = r.rho if isinstance(r, GeodesicRadius) else float(r)
    if rho < 0:
        raise ValueError("radius must be >= 0")
    if rho == 0.0:
        return 0.0
    val, _ = quad(lambda t: math.sinh(t) ** (n - 1), 0.0, rho, epsabs=0.0, epsrel=1e-12)
    return sphere_area(n) * val


def ball_volume_table(n: int, rho_max: float, m: int = 4096):
    """Dense (rho, volume) table for fast interpolation/inversion."""
    rho = np.linspace(0.0, rho_max, m)
    h = rho[1] - rho[0]
    dens = sphere_area(n) * np.sinh(rho) ** (n - 1)
    # composite Simpson on the half-steps keeps the cumulative sum accurate
    mid = sphere_area(n) * np.sinh((rho[:-1] + rho[1:]) / 2.0) ** (n - 1)
    steps = (dens[:-1] + 4.0 * mid + dens[1:]) * (h / 6.0)
    vol = np.concatenate([[0.0], np.cumsum(steps)])
    return rho, vol


def ball_volume_inverse(n: int, v, rho_max: float = 40.0) -> float:
    """Geodesic radius of the origin-centered ball with hyperbolic volume v."""
    v = float(v)
    if v < 0:
        raise ValueError("volume must be >= 0")
    if v == 0.0:
        return 0.0
    rho, vol = ball_volume_table(n, rho_max)
    if v > vol[-1]:
        raise ValueError(f"volume {v} exceeds table range (rho_max={rho_max})")
    return float(np.interp(v, vol, rho))


def conformal_pushforward(values, rho_nodes, n: int, k: int) -> np.ndarray:
    """Weight a radial profile into its Euclidean counterpart on the unit ball.

    Returns g(r) = (2/(1-r^2))^(n/2-k) f on the image grid r = tanh(rho/2).
    This is the diagnostic bridge between the hyperbolic quadratic form of
    order k and the Euclidean poly-Laplacian form on the ball.
    """
    if n <= 2 * k:
        raise ValueError(f"pushforward weight requires n > 2k (got n={n}, k={k})")
    rho = np.asarray(rho_nodes, dtype=float)
    r = euclidean_radius(rho)
    w = (2.0 / (1.0 - r ** 2)) ** (n / 2.0 - k)
    return w * np.asarray(values, dtype=float)


def conformal_pullback(values, rho_nodes, n: int, k: int) -> np.ndarray:
    """Inverse of conformal_pushforward on the same grid."""
    if n <= 2 * k:
        raise ValueError(f"pushforward weight requires n > 2k (got n={n}, k={k})")
    rho = np.asarray(rho_nodes, dtype=float)
    r = euclidean_radius(rho)
    w = (2.0 / (1.0 - r ** 2)) ** (n / 2.0 - k)
    return np.asarray(values, dtype=float) / w
