"""Ball-model primitives: Mobius maps, distances, volumes, conversions."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from hyperball.geometry import (BallPoint, GeodesicRadius, ball_volume, ball_volume_inverse,
                                conformal_factor, conformal_pullback, conformal_pushforward,
                                euclidean_radius, geodesic_distance, geodesic_radius_from_euclidean,
                                mobius_transform, pairwise_distance, sphere_area)


def random_ball_points(rng, m, n, rmax=0.9):
    d = rng.standard_normal((m, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = rmax * rng.random(m) ** (1.0 / n)
    return d * r[:, None]


def test_ball_point_guard():
    with pytest.raises(ValueError):
        BallPoint.of([1.0, 0.0])
    with pytest.raises(ValueError):
        BallPoint.of([0.3])  # n >= 2
    p = BallPoint.of([0.3, 0.4])
    assert p.n == 2


def test_mobius_at_zero_center():
    out = mobius_transform([0.0, 0.0, 0.0], [0.3, 0.0, 0.0])
    assert np.allclose(out.coords, [-0.3, 0.0, 0.0], atol=1e-15)


def test_mobius_sends_center_to_origin():
    out = mobius_transform([0.5, 0.0, 0.0], [0.5, 0.0, 0.0])
    assert np.allclose(out.coords, 0.0, atol=1e-15)


def test_mobius_at_origin_argument():
    out = mobius_transform([0.5, 0.0, 0.0], [0.0, 0.0, 0.0])
    assert np.allclose(out.coords, [0.5, 0.0, 0.0], atol=1e-15)


def test_mobius_dimension_mismatch():
    with pytest.raises(ValueError):
        mobius_transform([0.1, 0.0], [0.1, 0.0, 0.0])


def test_mobius_is_involution(rng):
    for n in (3, 6):
        a = random_ball_points(rng, 50, n)
        x = random_ball_points(rng, 50, n)
        for ai, xi in zip(a, x):
            y = mobius_transform(ai, xi)
            back = mobius_transform(ai, y.coords)
            assert np.allclose(back.coords, xi, atol=1e-12)


def test_mobius_preserves_distance(rng):
    # rho(T_a x, T_a y) = rho(x, y) on 1000 random triples, n in {3, 6}
    for n in (3, 6):
        a = random_ball_points(rng, 500, n)
        x = random_ball_points(rng, 500, n)
        y = random_ball_points(rng, 500, n)
        for ai, xi, yi in zip(a, x, y):
            d0 = geodesic_distance(xi, yi).rho
            d1 = geodesic_distance(mobius_transform(ai, xi).coords,
                                   mobius_transform(ai, yi).coords).rho
            assert abs(d0 - d1) < 1e-10


def test_distance_from_origin_closed_form():
    d = geodesic_distance([0.0, 0.0, 0.0], [0.5, 0.0, 0.0])
    assert abs(d.rho - math.log(3.0)) < 1e-14


def test_distance_symmetry_and_triangle(rng):
    pts = random_ball_points(rng, 450, 3)
    x, y, z = pts[:150], pts[150:300], pts[300:]
    for xi, yi, zi in zip(x, y, z):
        dxy = geodesic_distance(xi, yi).rho
        dyx = geodesic_distance(yi, xi).rho
        assert abs(dxy - dyx) < 1e-12
        dxz = geodesic_distance(xi, zi).rho
        dzy = geodesic_distance(zi, yi).rho
        assert dxy <= dxz + dzy + 1e-12


def test_distance_matches_metric_arclength():
    # collinear points: the geodesic is the diameter, oracle = arclength quadrature
    oracle, _ = quad(lambda s: 2.0 / (1.0 - s * s), 0.3, 0.6, epsabs=1e-14, epsrel=1e-14)
    d = geodesic_distance([0.3, 0.0, 0.0], [0.6, 0.0, 0.0]).rho
    assert abs(d - oracle) < 1e-12


def test_pairwise_distance_matches_scalar(rng):
    x = random_ball_points(rng, 200, 4)
    y = random_ball_points(rng, 200, 4)
    d = pairwise_distance(x, y)
    for i in range(0, 200, 17):
        assert abs(d[i] - geodesic_distance(x[i], y[i]).rho) < 1e-12


def test_conformal_factor_values():
    assert conformal_factor([0.0, 0.0]) == 2.0
    assert abs(conformal_factor([0.5, 0.0]) - 8.0 / 3.0) < 1e-15


def test_conformal_factor_monotone():
    rs = np.linspace(0.0, 0.999, 50)
    vals = [2.0 / (1.0 - r * r) for r in rs]
    assert np.all(np.diff(vals) > 0)


def test_ball_volume_zero_radius():
    assert ball_volume(3, 0.0) == 0.0


def test_ball_volume_n3_closed_form():
    # oracle: omega_2 int_0^1 sinh^2 = pi (sinh 2 - 2)
    closed = math.pi * (math.sinh(2.0) - 2.0)
    val = ball_volume(3, GeodesicRadius(1.0))
    assert abs(val - closed) / closed < 1e-12
    assert abs(val - 5.110932705708289) < 1e-10


def test_ball_volume_small_radius_euclidean():
    n = 4
    r = 1e-3
    euclid = sphere_area(n) * r ** n / n
    assert abs(ball_volume(n, r) / euclid - 1.0) < 1e-5


def test_ball_volume_increasing():
    vals = [ball_volume(5, r) for r in np.linspace(0.1, 3.0, 12)]
    assert np.all(np.diff(vals) > 0)


def test_ball_volume_monte_carlo(rng):
    # uniform sampling in the Euclidean ball of radius tanh(r/2), importance weights
    n, r = 3, 1.0
    R = math.tanh(r / 2.0)
    m = 1_000_000
    pts = rng.standard_normal((m, n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts *= R * rng.random(m)[:, None] ** (1.0 / n)
    w = (2.0 / (1.0 - np.sum(pts * pts, axis=1))) ** n
    ball_eucl = math.pi ** (n / 2) / math.gamma(n / 2 + 1) * R ** n
    est = ball_eucl * w.mean()
    se = ball_eucl * w.std(ddof=1) / math.sqrt(m)
    assert abs(est - ball_volume(n, r)) < 3.0 * se


def test_radius_conversion_roundtrip():
    # the Euclidean chart loses absolute rho-precision like e^rho * eps, which
    # is why everything internal stays in rho; test where both charts are faithful
    rho = np.linspace(1e-6, 4.0, 200)
    back = geodesic_radius_from_euclidean(euclidean_radius(rho))
    assert np.max(np.abs(back - rho)) < 1e-14 * np.max(rho) + 1e-15
    rho_far = np.linspace(4.0, 20.0, 60)
    back_far = geodesic_radius_from_euclidean(euclidean_radius(rho_far))
    assert np.max(np.abs(back_far - rho_far) * np.exp(-rho_far)) < 1e-14
    assert abs(ball_volume_inverse(3, ball_volume(3, 2.0)) - 2.0) < 1e-6


def test_pushforward_zero_and_center():
    rho = np.linspace(0.01, 3.0, 50)
    zero = conformal_pushforward(np.zeros(50), rho, 5, 2)
    assert np.all(zero == 0.0)
    g = conformal_pushforward(np.ones(1), np.array([1e-14]), 6, 2)
    assert abs(g[0] - 2.0 ** (6 / 2 - 2)) < 1e-10


def test_pushforward_roundtrip():
    rho = np.linspace(0.01, 5.0, 80)
    f = np.exp(-rho)
    g = conformal_pushforward(f, rho, 5, 1)
    back = conformal_pullback(g, rho, 5, 1)
    assert np.max(np.abs(back - f)) < 1e-14


def test_pushforward_requires_subcritical_order():
    with pytest.raises(ValueError):
        conformal_pushforward(np.ones(3), np.array([0.1, 0.2, 0.3]), 4, 2)
