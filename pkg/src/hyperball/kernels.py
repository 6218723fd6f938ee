"""Shifted-factor decomposition and explicit kernels of the order-2k inverse.

The spectrally shifted operator of order 2k factors into k shifted conformal
Laplacians (P1 - lambda_j), where the lambda_j are the roots of

    x (x+2) (x+6) ... (x + k(k-1)) = alpha_k,   alpha_k = prod (2i-1)^2/4.

x = 1/4 is always a root (the i-th factor at 1/4 is exactly (2i-1)^2/4) and
every root satisfies Re lambda_j <= 1/4.  For real roots the resolvent kernel
has the explicit one-dimensional integral form

    K(rho) = A_n / sinh(rho)^(n-2) *
             int_0^pi (cosh rho + cos t)^((n-4)/2 - theta) (sin t)^(2 theta + 1) dt

with theta = sqrt(1/4 - lambda_j) - 1/2, and is positive and strictly
decreasing in rho.  Conjugate-pair factors are handled through the positive
multiplier |(mu^2+1)/4 - lambda|^(-2).  The composed inverse kernel is built
two independent ways (factor convolution vs direct reciprocal-multiplier
inversion) and the two routes are compared as an internal consistency check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .grids import RadialGrid, RadialProfile, FrequencyGrid, frequency_grid, leggauss, transform_grid
from .spectral import RadialTransformer, gk_multiplier, poincare_alpha

__all__ = [
    "FactorizationSpectrum",
    "KernelProfile",
    "MonotonicityReport",
    "factorization_roots",
    "theta_parameter",
    "resolvent_kernel",
    "pair_kernel",
    "radial_convolution",
    "gk_inverse_kernel",
    "monotonicity_certificate",
    "kernel_grid",
    "export_kernel_csv",
]


def _shift_polynomial(k: int) -> list[Fraction]:
    """Exact coefficients (low -> high) of prod_{i=1..k} (x + i(i-1)) - alpha_k."""
    coeffs = [Fraction(1)]
    for i in range(1, k + 1):
        c = i * (i - 1)
        coeffs = [Fraction(0)] + coeffs
        for j in range(len(coeffs) - 1):
            coeffs[j] += c * coeffs[j + 1]
    alpha = Fraction(1)
    for i in range(1, k + 1):
        alpha *= Fraction((2 * i - 1) ** 2, 4)
    coeffs[0] -= alpha
    return coeffs


def _deflate_quarter(coeffs: list[Fraction]) -> list[Fraction]:
    """Exact synthetic division by (x - 1/4); remainder must vanish."""
    q = [Fraction(0)] * (len(coeffs) - 1)
    carry = Fraction(0)
    for j in range(len(coeffs) - 1, 0, -1):
        carry = coeffs[j] + carry / 4
        q[j - 1] = carry
    remainder = coeffs[0] + carry / 4
    if remainder != 0:
        raise ArithmeticError("1/4 failed to divide the shift polynomial exactly")
    return q


def _poly_eval(coeffs, x):
    acc = 0.0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class FactorizationSpectrum:
    """Roots lambda_j of the shift polynomial with derived decay parameters."""

    k: int
    roots: tuple
    thetas: dict
    alpha: float

    @property
    def real_roots(self):
        return [r for r in self.roots if r.imag == 0.0]

    @property
    def complex_pairs(self):
        ups = [r for r in self.roots if r.imag > 0.0]
        return [(r, r.conjugate()) for r in ups]


def factorization_roots(k: int, residual_tol: float = 1e-10) -> FactorizationSpectrum:
    """Solve the degree-k shift polynomial exactly-then-numerically.

    The coefficients are expanded in exact rational arithmetic, the known root
    1/4 is deflated analytically, the rest come from the companion matrix and
    a Newton polish.  Substitution residuals are checked relative to alpha_k.
    """
    if not 1 <= k <= 8:
        raise ValueError("order k must be in 1..8")
    coeffs = _shift_polynomial(k)
    quotient = _deflate_quarter(coeffs)
    roots = [complex(0.25)]
    if k > 1:
        qf = np.array([float(c) for c in quotient])
        raw = np.roots(qf[::-1])
        cf = np.array([float(c) for c in coeffs])
        dcf = np.array([float((j) * coeffs[j]) for j in range(1, len(coeffs))])
        for r in raw:
            x = complex(r)
            for _ in range(8):
                fx = _poly_eval(cf, x)
                dfx = _poly_eval(dcf, x)
                if dfx == 0:
                    break
                step = fx / dfx
                x -= step
                if abs(step) < 1e-15 * max(1.0, abs(x)):
                    break
            if abs(x.imag) < 1e-9 * max(1.0, abs(x.real)):
                x = complex(x.real)
            roots.append(x)
    roots.sort(key=lambda z: (-z.real, z.imag))
    alpha = poincare_alpha(k)
    cf = np.array([float(c) for c in coeffs])
    scale = max(1.0, alpha)
    for r in roots:
        res = abs(_poly_eval(cf, r)) / scale
        if res > residual_tol:
            raise ArithmeticError(f"root {r} has residual {res:.3e} > {residual_tol:g}")
        if r.real > 0.25 + 1e-12:
            raise ArithmeticError(f"root {r} violates Re lambda <= 1/4")
    if min(abs(r - 0.25) for r in roots) > 1e-12:
        raise ArithmeticError("1/4 is missing from the root set")
    for r in roots:
        if r.imag != 0.0 and not any(abs(s - r.conjugate()) < 1e-9 for s in roots):
            raise ArithmeticError(f"complex root {r} lacks its conjugate")
    thetas = {r.real: theta_parameter(r.real, n=None) for r in roots if r.imag == 0.0}
    return FactorizationSpectrum(k=k, roots=tuple(roots), thetas=thetas, alpha=alpha)


def theta_parameter(lambda_j: float, n: int | None = None) -> float:
    """Decay exponent theta = sqrt(1/4 - lambda_j) - 1/2 of a real-root resolvent.

    Equals sqrt(lambda_tilde + (n-1)^2/4) - 1/2 with
    lambda_tilde = -(n^2-2n)/4 - lambda_j; the n-dependence cancels.
    """
    if lambda_j > 0.25:
        raise ValueError("real factorization roots satisfy lambda_j <= 1/4")
    return math.sqrt(0.25 - lambda_j) - 0.5


# ---------------------------------------------------------------------------
# kernel profiles


@dataclass
class KernelProfile:
    """Radial kernel values K(rho_i) > 0 on a geodesic grid."""

    grid: RadialGrid
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.grid.n

    def as_profile(self) -> RadialProfile:
        return RadialProfile(self.grid, self.values)


@dataclass(frozen=True)
class MonotonicityReport:
    passed: bool
    positive: bool
    strictly_decreasing: bool
    min_decrement: float
    first_violation: int | None

    def __bool__(self):
        return self.passed


def monotonicity_certificate(K: KernelProfile) -> MonotonicityReport:
    """Verify positivity and strict decrease at every adjacent node pair."""
    v = K.values
    positive = bool(np.all(v > 0.0))
    diffs = v[:-1] - v[1:]
    decreasing = bool(np.all(diffs > 0.0))
    first = None
    if not positive:
        first = int(np.argmax(v <= 0.0))
    elif not decreasing:
        first = int(np.argmax(diffs <= 0.0))
    return MonotonicityReport(
        passed=positive and decreasing,
        positive=positive,
        strictly_decreasing=decreasing,
        min_decrement=float(diffs.min()) if diffs.size else math.inf,
        first_violation=first,
    )


def kernel_grid(n: int, rho_max: float = 8.0) -> RadialGrid:
    """Default kernel grid: log panels from 1e-3 up to 0.5, linear beyond."""
    return transform_grid(n, rho_min=1e-3, rho_split=0.5, rho_max=rho_max,
                          panels_log=12, panels_lin=45, order=8)


def _amplitude_constant(theta: float, n: int) -> float:
    return (2 * math.pi) ** (-n / 2.0) * math.gamma(n / 2.0 + theta) \
        / (2.0 ** (theta + 1.0) * math.gamma(theta + 1.0))


def _resolvent_t_integral(rho: np.ndarray, theta: float, n: int, order: int) -> np.ndarray:
    """int_0^pi (cosh rho + cos t)^((n-4)/2-theta) (sin t)^(2 theta+1) dt, vectorized in rho.

    The integrand develops a width-rho feature at t = pi when the first
    exponent is negative, so the interval is split there with a rho-scaled
    corner panel.
    """
    t, w = leggauss(order)
    p = (n - 4) / 2.0 - theta
    q = 2.0 * theta + 1.0
    out = np.zeros_like(rho)
    ch = np.cosh(rho)
    for j, r in enumerate(rho):
        delta = min(1.0, max(12.0 * r, 1e-3))
        edges = [0.0, math.pi / 2.0, math.pi - delta, math.pi]
        acc = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            tt = (a + b) / 2.0 + (b - a) / 2.0 * t
            acc += (b - a) / 2.0 * np.sum(w * (ch[j] + np.cos(tt)) ** p * np.sin(tt) ** q)
        out[j] = acc
    return out


def resolvent_kernel(lambda_j: float, n: int, grid: RadialGrid, order: int = 256) -> KernelProfile:
    """Explicit resolvent kernel of (P1 - lambda_j) for a real root lambda_j <= 1/4.

    Evaluates the closed t-integral formula with Gauss-Legendre panels and
    verifies convergence by doubling the order (tolerance 1e-9 relative).
    """
    if n < 3:
        raise ValueError("the explicit kernel formula requires n >= 3")
    if isinstance(lambda_j, complex):
        if lambda_j.imag != 0:
            raise ValueError("resolvent_kernel takes a real root; use pair_kernel for pairs")
        lambda_j = lambda_j.real
    theta = theta_parameter(lambda_j)
    A = _amplitude_constant(theta, n)
    base = _resolvent_t_integral(grid.rho, theta, n, order)
    fine = _resolvent_t_integral(grid.rho, theta, n, 2 * order)
    rel = np.max(np.abs(base - fine) / np.abs(fine))
    if rel > 1e-9:
        raise ArithmeticError(
            f"t-quadrature not converged (doubling changed result by {rel:.2e})"
        )
    vals = A / np.sinh(grid.rho) ** (n - 2) * fine
    return KernelProfile(grid, vals, meta={"n": n, "k_or_root": lambda_j, "route": "closed-form",
                                           "decay_rate": n / 2.0 + theta, "transform_power": 2})


def _algebraic_tail_fit(mus: np.ndarray, vals: np.ndarray, powers=(2, 4, 6)):
    """Least-squares fit c_2/mu^2 + c_4/mu^4 + ... on sampled transform data."""
    A = np.stack([mus ** (-p) for p in powers], axis=1)
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)

    def fit(mu):
        mu = np.asarray(mu, dtype=float)
        return sum(c * mu ** (-p) for c, p in zip(coef, powers))

    return fit


def _edge_fit(K: KernelProfile, a_decay: float, window: float = 3.0):
    """Fit K ~ C e^(-a rho) (1 + k2 e^(-2 rho)) on the outer part of the grid.

    The kernels here expand in e^(-2 rho): the e^(-rho) coefficient of the
    t-integral vanishes because int cos(t) sin(t)^q dt = 0 over [0, pi].
    """
    rho = K.grid.rho
    sel = rho >= rho[-1] - window
    y = K.values[sel] * np.exp(a_decay * rho[sel])
    A = np.stack([np.ones(int(sel.sum())), np.exp(-2.0 * rho[sel])], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    C, k2c = float(coef[0]), float(coef[1])
    return C, (k2c / C if C != 0.0 else 0.0)


def _transform_tail_completion(K: KernelProfile, a_decay: float, mus: np.ndarray) -> np.ndarray:
    """Closed-form continuation of a kernel transform past the grid truncation.

    Beyond L = rho_max the integrand K * phi_mu * omega sinh^(n-1) is a sum of
    damped plane waves: K ~ C e^(-a rho)(1 + c1 e^(-rho)), the volume factor
    expands in e^(-2 rho), and phi_mu ~ 2 Re[c(mu) e^(i mu rho/2)] e^(-(n-1)rho/2).
    Each term integrates to e^((i mu/2 - a_m) L) / (a_m - i mu/2); the slowest
    term (a_0 = 0 for the 1/4 root) is the Abel value of the pure oscillation.
    Without this completion the transform of the spectral-bottom factor is
    truncation-limited at every frequency.
    """
    from .spectral import harish_chandra_c

    n = K.n
    L = K.grid.rho_max
    C, k2 = _edge_fit(K, a_decay)
    theta_eff = a_decay - n / 2.0
    if theta_eff < -0.5 - 1e-9:
        raise ValueError("kernel decays slower than the spectral bottom allows")
    # coefficients of (1 + k2 q^2)(1 - q^2)^(n-1) in q = e^-rho, up to q^4
    poly = np.zeros(5)
    binom = [math.comb(n - 1, j) * (-1.0) ** j for j in range(3)]
    for j, b in enumerate(binom):
        if 2 * j <= 4:
            poly[2 * j] += b
        if 2 * j + 2 <= 4:
            poly[2 * j + 2] += b * k2
    cvals = np.array([harish_chandra_c(float(mu), n) for mu in np.atleast_1d(mus)])
    out = np.zeros(np.atleast_1d(mus).shape)
    mu_arr = np.atleast_1d(mus)
    pref = C * 2.0 ** (2 - n) * 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    for m, dm in enumerate(poly):
        if dm == 0.0:
            continue
        a_m = max(theta_eff + 0.5 + m, 0.0)
        term = np.exp((0.5j * mu_arr - a_m) * L) / (a_m - 0.5j * mu_arr)
        out = out + pref * dm * np.real(cvals * term)
    return out if np.ndim(mus) else float(out[0])


def pair_kernel(lambda_j: complex, n: int, grid: RadialGrid,
                freq: FrequencyGrid | None = None) -> KernelProfile:
    """Kernel of (P1-lambda)^-1 * (P1-conj(lambda))^-1 for a conjugate pair.

    Computed by inverting the real positive multiplier |(mu^2+1)/4 - lambda|^-2;
    identical whether built from lambda or its conjugate.
    """
    lam = complex(lambda_j)
    if lam.imag == 0.0:
        raise ValueError("pair_kernel needs Im lambda != 0; use resolvent_kernel")
    if lam.real > 0.25:
        raise ValueError("pair roots satisfy Re lambda <= 1/4")
    tr = RadialTransformer(grid, freq)

    def mult(mu):
        mu = np.asarray(mu, dtype=float)
        return 1.0 / (((mu ** 2 + 1.0) / 4.0 - lam.real) ** 2 + lam.imag ** 2)

    prof = tr.inverse_multiplier(mult)
    # the pair decays like the slower of its two implicit real-part factors
    rate = n / 2.0 + math.sqrt(max(0.25 - lam.real, 0.0)) - 0.5
    return KernelProfile(grid, prof.values, meta={"n": n, "k_or_root": lam,
                                                  "route": "pair-spectral", "decay_rate": rate,
                                                  "transform_power": 4})


def radial_convolution(K1: KernelProfile, K2: KernelProfile,
                       freq: FrequencyGrid | None = None) -> KernelProfile:
    """Hyperbolic radial convolution of two kernel profiles.

    Implemented spectrally: the factors' transforms are computed from the
    profiles, multiplied, and inverted.  Beyond the frequency truncation the
    measured transforms are continued by an algebraic tail fitted on the upper
    half of the grid, so the oscillatory tail windows stay honest.
    """
    if K1.grid.key() != K2.grid.key():
        raise ValueError("convolution factors must share one grid")
    for K in (K1, K2):
        # certificate over the significant range; far-tail nodes of composed
        # kernels sit below the inverse-transform noise floor
        scale = float(np.max(np.abs(K.values)))
        sig = np.nonzero(np.abs(K.values) >= 1e-9 * scale)[0]
        Ksig = KernelProfile(RadialGrid(K.n, K.grid.rho[sig], K.grid.rule_weights[sig]),
                             K.values[sig]) if sig.size < K.values.size else K
        rep = monotonicity_certificate(Ksig)
        if not rep.passed:
            raise ValueError(f"convolution factor fails positivity/decay at node {rep.first_violation}")
    tr = RadialTransformer(K1.grid, freq)
    lam = tr.freq.lambdas
    vals = []
    for K in (K1, K2):
        F = tr.forward(K.as_profile()).values
        rate = K.meta.get("decay_rate")
        if rate is not None:
            F = F + _transform_tail_completion(K, float(rate), lam)
        vals.append(F)
    upper = lam >= 0.5 * tr.freq.lambda_max
    p1 = int(K1.meta.get("transform_power", 2))
    p2 = int(K2.meta.get("transform_power", 2))
    fit1 = _algebraic_tail_fit(lam[upper], vals[0][upper], powers=(p1, p1 + 2, p1 + 4))
    fit2 = _algebraic_tail_fit(lam[upper], vals[1][upper], powers=(p2, p2 + 2, p2 + 4))
    base = vals[0] * vals[1]
    prof = tr.inverse_multiplier(lambda mu: fit1(mu) * fit2(mu), base_values=base)
    rates = [K.meta.get("decay_rate") for K in (K1, K2)]
    meta = {"n": K1.n, "k_or_root": (K1.meta.get("k_or_root"), K2.meta.get("k_or_root")),
            "route": "convolution"}
    if all(r is not None for r in rates):
        meta["decay_rate"] = min(rates)
    meta["transform_power"] = int(K1.meta.get("transform_power", 2)) \
        + int(K2.meta.get("transform_power", 2))
    return KernelProfile(K1.grid, prof.values, meta=meta)


def gk_inverse_kernel(k: int, n: int, grid: RadialGrid, route: str = "spectral",
                      freq: FrequencyGrid | None = None) -> KernelProfile:
    """Kernel of the inverse shifted product operator, by either route.

    route="convolution" composes the factor kernels over the root spectrum
    (real roots by the explicit formula, conjugate pairs spectrally);
    route="spectral" inverts the reciprocal symbol directly.  The symbol zero
    at mu = 0 is cancelled by the quadratically vanishing Plancherel weight.
    """
    if n <= 2 * k:
        raise ValueError(f"kernel requires n > 2k (got n={n}, k={k})")
    if route == "spectral":
        tr = RadialTransformer(grid, freq)
        prof = tr.inverse_multiplier(lambda mu: gk_multiplier(mu, k, -1.0))
        return KernelProfile(grid, prof.values, meta={"n": n, "k_or_root": k, "route": "spectral"})
    if route == "convolution":
        spec = factorization_roots(k)
        # compose fastest-decaying factors first: intermediates then stay well
        # above the transform noise floor, and the slow spectral-bottom factor
        # (root 1/4, whose transform needs its analytic tail) enters once, last
        factors = [resolvent_kernel(r.real, n, grid) for r in
                   sorted(spec.real_roots, key=lambda z: z.real)]
        factors = [pair_kernel(pair[0], n, grid, freq) for pair in spec.complex_pairs] + factors
        out = factors[0]
        for K in factors[1:]:
            out = radial_convolution(out, K, freq)
        out.meta["n"], out.meta["k_or_root"], out.meta["route"] = n, k, "convolution"
        return out
    raise ValueError(f"unknown route {route!r}")


def dual_route_gap(k: int, n: int, grid: RadialGrid, window=(0.2, 4.0),
                   freq: FrequencyGrid | None = None):
    """Max relative disagreement of the two inverse-kernel routes on a window."""
    Kc = gk_inverse_kernel(k, n, grid, route="convolution", freq=freq)
    Ks = gk_inverse_kernel(k, n, grid, route="spectral", freq=freq)
    sel = (grid.rho >= window[0]) & (grid.rho <= window[1])
    gap = np.max(np.abs(Kc.values[sel] - Ks.values[sel]) / np.abs(Ks.values[sel]))
    return float(gap), Kc, Ks


def export_kernel_csv(K: KernelProfile, path) -> None:
    """Write a kernel profile as CSV (rho, value, route, n, k)."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["rho", "value", "route", "n", "k"])
        for r, v in zip(K.grid.rho, K.values):
            wr.writerow([f"{r:.12g}", f"{v:.12g}", K.meta.get("route", ""),
                         K.meta.get("n", ""), K.meta.get("k_or_root", "")])
