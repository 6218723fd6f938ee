"""Named verification suites producing machine-readable certificates.

Each suite returns a list of {name, passed, value, tolerance, info} entries;
the CLI turns them into a certificate JSON and an exit code.  These are the
same quantitative checks the test suite pins down, packaged for the command
line.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import ball_volume
from .grids import RadialProfile, frequency_grid, transform_grid, uniform_grid
from .kernels import (_shift_polynomial, dual_route_gap, factorization_roots, kernel_grid,
                      monotonicity_certificate, resolvent_kernel)
from .rearrange import HyperbolicSampler, geodesic_rearrangement, radial_step_function, symmetrization_gap
from .spectral import RadialTransformer, normalization_selftest
from .solver import SolverConfig, decay_check, solve_extremal
from .constants import classical_first_order_constant, euclidean_sobolev_constant, compare_constants

__all__ = ["run_suite", "SUITES"]


def _entry(name, passed, value, tolerance, **info):
    return {"name": name, "passed": bool(passed), "value": value,
            "tolerance": tolerance, "info": info}


def suite_plancherel(n: int = 3, **_):
    out = []
    err = normalization_selftest(n)
    out.append(_entry(f"normalization-selftest-n{n}", err < 1e-7, err, 1e-7))
    grid = transform_grid(n, rho_max=12.0, panels_log=15, panels_lin=60, order=12)
    tr = RadialTransformer(grid, frequency_grid(n, lambda_max=30.0, panels=32, order=12))
    for a in (0.5, 1.0, 2.0):
        f = RadialProfile(grid, np.exp(-a * grid.rho ** 2))
        F = tr.forward(f)
        lhs = f.l2_norm() ** 2
        rel = abs(lhs - F.norm_sq()) / lhs
        g = tr.inverse(F)
        rt = math.sqrt(float(np.sum(grid.volume_weights * (g.values - f.values) ** 2))) / f.l2_norm()
        out.append(_entry(f"plancherel-gaussian-a{a}-n{n}", rel < 1e-6, rel, 1e-6))
        out.append(_entry(f"roundtrip-gaussian-a{a}-n{n}", rt < 1e-6, rt, 1e-6))
    return out


def suite_roots(k_max: int = 6, **_):
    out = []
    for k in range(1, k_max + 1):
        spec = factorization_roots(k)
        quarter = min(abs(r - 0.25) for r in spec.roots)
        out.append(_entry(f"root-quarter-k{k}", quarter < 1e-12, quarter, 1e-12))
        re_max = max(r.real for r in spec.roots)
        out.append(_entry(f"root-realpart-k{k}", re_max <= 0.25 + 1e-12, re_max, 0.25))
        coeffs = [float(c) for c in _shift_polynomial(k)]
        res = max(abs(sum(c * r ** j for j, c in enumerate(coeffs))) for r in spec.roots)
        scale = max(1.0, spec.alpha)
        out.append(_entry(f"root-residual-k{k}", res / scale < 1e-10, res / scale, 1e-10,
                          roots=[[r.real, r.imag] for r in spec.roots]))
    return out


def suite_kernels(k: int = 2, n: int = 6, **_):
    out = []
    grid = kernel_grid(3, rho_max=6.0)
    K = resolvent_kernel(0.25, 3, grid)
    sel = (grid.rho >= 0.1) & (grid.rho <= 5.0)
    closed = 1.0 / (4.0 * math.pi * np.sinh(grid.rho[sel]))
    rel = float(np.max(np.abs(K.values[sel] - closed) / closed))
    out.append(_entry("resolvent-closed-form-n3", rel < 1e-8, rel, 1e-8))
    gap, Kc, Ks = dual_route_gap(k, n, kernel_grid(n))
    out.append(_entry(f"dual-route-k{k}-n{n}", gap < 1e-4, gap, 1e-4))
    for tag, KK in (("convolution", Kc), ("spectral", Ks)):
        rep = monotonicity_certificate(KK)
        out.append(_entry(f"monotone-{tag}-k{k}-n{n}", rep.passed,
                          rep.min_decrement, 0.0, first_violation=rep.first_violation))
    return out


def suite_rearrangement(seed: int = 0, samples: int = 20000, **_):
    out = []
    n = 3
    grid = transform_grid(n, rho_max=8.0, panels_log=10, panels_lin=40, order=8)
    rng = np.random.default_rng(seed)
    radii = rng.uniform(0.3, 2.5, size=3)
    heights = rng.uniform(0.2, 2.0, size=3)
    _, eval_rho = radial_step_function(n, radii, heights)
    f = RadialProfile(grid, eval_rho(grid.rho))
    fstar = geodesic_rearrangement(f, grid, levels=np.sort(np.unique(np.cumsum(heights)))[::-1] * (1 - 1e-9))
    for p in (2.0, 3.0):
        rel = abs(fstar.lp_norm(p) - f.lp_norm(p)) / f.lp_norm(p)
        out.append(_entry(f"lp-preservation-p{p}", rel < 1e-3, rel, 1e-3))
    # off-center indicator vs decreasing kernel
    grid_k = kernel_grid(n, rho_max=14.0)
    K = resolvent_kernel(0.25, n, grid_k)
    center = np.array([0.3, 0.0, 0.0])
    r0 = 1.0

    def h_func(pts):
        from .geometry import pairwise_distance
        return (pairwise_distance(pts, np.broadcast_to(center, pts.shape)) < r0).astype(float)

    vol = ball_volume(n, r0)
    from .geometry import ball_volume_inverse
    rstar = ball_volume_inverse(n, vol)

    def h_star(rho):
        return (rho < rstar).astype(float)

    rep = symmetrization_gap(h_func, h_star, K, n, rho_max=6.0, samples=samples, seed=seed)
    out.append(_entry("symmetrization-offcenter-ball", rep.passes, rep.gap,
                      -2.0 * rep.gap_stderr, stderr=rep.gap_stderr))
    return out


def suite_decay(**_):
    cfg = SolverConfig(n=5, k=2, p=3.0)
    prof, rep = solve_extremal(cfg)
    d = decay_check(prof, cfg)
    return [
        _entry("subcritical-converged", rep.converged, rep.el_residual, cfg.el_tol),
        _entry("decay-envelope", d.passed, d.fitted_rate, d.bound_rate,
               prefactor=d.prefactor),
        _entry("profile-decreasing", bool(np.all(np.diff(prof.values) < 0)),
               float(np.max(np.diff(prof.values))), 0.0),
    ]


def suite_constants(**_):
    out = []
    for n, closed in ((3, classical_first_order_constant(3)), (4, classical_first_order_constant(4))):
        val = euclidean_sobolev_constant(n, 1)
        rel = abs(val - closed) / closed
        out.append(_entry(f"sobolev-bubble-vs-closed-n{n}", rel < 1e-4, rel, 1e-4, value=val))
    rep = compare_constants(5, 2, 3.0)
    out.append(_entry("subcritical-5-2-3", rep.verdict == "PASS", rep.C_value, None,
                      S=rep.S_value))
    return out


SUITES = {
    "plancherel": suite_plancherel,
    "roots": suite_roots,
    "kernels": suite_kernels,
    "rearrangement": suite_rearrangement,
    "decay": suite_decay,
    "constants": suite_constants,
}


def run_suite(name: str, **kwargs):
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](**kwargs)
