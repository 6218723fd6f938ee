"""Command-line interface: solve, verify, constants, kernel, transform, rearrange.

Configuration may come from a TOML or JSON file (--config); explicit flags
override file values.  Every command writes deterministic artifacts (see
report.py) and returns 0 on success, 1 on a computation or verification
failure, 2 on a usage/configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constants import compare_constants, euclidean_sobolev_constant
from .geometry import ball_volume, ball_volume_inverse
from .grids import RadialGrid, RadialProfile, frequency_grid, transform_grid
from .kernels import export_kernel_csv, gk_inverse_kernel, kernel_grid, monotonicity_certificate, resolvent_kernel
from .rearrange import radial_step_function, symmetrization_gap, geodesic_rearrangement
from .report import fmt_number, report_document, write_csv, write_json
from .solver import SolverConfig, apply_gk, DiscreteOperator, decay_check, solve_extremal
from .spectral import RadialTransformer
from .svgplot import line_plot
from .verify import SUITES, run_suite

USAGE_ERROR, FAILURE, OK = 2, 1, 0


def _load_config_file(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ValueError(f"config file {path} does not exist")
    text = p.read_bytes()
    if p.suffix.lower() == ".json":
        return json.loads(text)
    if p.suffix.lower() == ".toml":
        try:
            import tomllib  # Python >= 3.11
        except ImportError:
            import tomli as tomllib
        return tomllib.loads(text.decode())
    raise ValueError(f"config file must be .toml or .json, got {p.suffix!r}")


def _merge_config(args, names, file_section) -> dict:
    """File values first, explicit flags override."""
    cfg = dict(file_section or {})
    for name in names:
        val = getattr(args, name, None)
        if val is not None:
            cfg[name] = val
    return cfg


def _resolved(args, extra: dict) -> dict:
    base = {k: v for k, v in vars(args).items()
            if k not in ("func", "config") and v is not None}
    base.update(extra)
    return base


def cmd_solve(args) -> int:
    section = {}
    if args.config:
        section = _load_config_file(args.config).get("solve", {})
    cfg = _merge_config(args, ["n", "k", "p", "L", "N", "tol", "max_iter", "damping", "seed_profile"], section)
    for key in ("n", "k", "p"):
        if key not in cfg:
            print(f"error: missing required parameter --{key}", file=sys.stderr)
            return USAGE_ERROR
    try:
        solver_cfg = SolverConfig(**{k: cfg[k] for k in
                                     ("n", "k", "p", "L", "N", "tol", "max_iter", "damping", "seed_profile")
                                     if k in cfg})
    except (ValueError, TypeError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return USAGE_ERROR
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        profile, report = solve_extremal(solver_cfg)
    except ArithmeticError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return FAILURE
    dec = decay_check(profile, solver_cfg)
    u_el = report.quotient ** (1.0 / (solver_cfg.p - 2.0)) * profile.values
    write_csv(out_dir / "profile.csv", ["rho", "f", "u_el"],
              list(zip(profile.grid.rho.tolist(), profile.values.tolist(), u_el.tolist())))
    results = {
        "energy": report.energy,
        "lp_norm": report.lp_norm,
        "quotient": report.quotient,
        "el_residual": report.el_residual,
        "iterations": report.iterations,
        "converged": report.converged,
        "concentration": report.concentration,
        "decay_exponent_fit": report.decay_exponent_fit,
        "decay_check_passed": dec.passed,
        "decay_bound_rate": dec.bound_rate,
    }
    doc = report_document(vars_config(solver_cfg), results)
    write_json(out_dir / "report.json", doc)
    if not args.json_only:
        sel = profile.values > 0
        line_plot(out_dir / "profile.svg", profile.grid.rho[sel].tolist(),
                  [("f", profile.values[sel].tolist())],
                  title=f"extremal profile n={solver_cfg.n} k={solver_cfg.k} p={solver_cfg.p:g}",
                  xlabel="rho", ylabel="log10 f", logy=True)
    if not (report.converged or report.concentration):
        print("solver did not converge and no concentration was diagnosed", file=sys.stderr)
        return FAILURE
    return OK


def vars_config(cfg: SolverConfig) -> dict:
    return {
        "n": cfg.n, "k": cfg.k, "p": cfg.p, "L": cfg.L, "N": cfg.N,
        "tol": cfg.tol, "el_tol": cfg.el_tol, "max_iter": cfg.max_iter,
        "damping": cfg.damping, "seed_profile": cfg.seed_profile,
        "version": __version__,
    }


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"error: unknown suite {args.suite!r}; pick one of {sorted(SUITES)}", file=sys.stderr)
        return USAGE_ERROR
    kwargs = {}
    if args.k is not None:
        kwargs["k"] = args.k
    if args.n is not None:
        kwargs["n"] = args.n
    if args.k_max is not None:
        kwargs["k_max"] = args.k_max
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.samples is not None:
        kwargs["samples"] = args.samples
    entries = run_suite(args.suite, **kwargs)
    ok = all(e["passed"] for e in entries)
    doc = report_document({"suite": args.suite, **kwargs},
                          {"passed": ok}, certificates=entries)
    out = Path(args.out) if args.out else Path(f"verify_{args.suite}.json")
    write_json(out, doc)
    for e in entries:
        status = "PASS" if e["passed"] else "FAIL"
        print(f"[{status}] {e['name']}: value={fmt_number(e['value'])} tol={fmt_number(e['tolerance'])}")
    return OK if ok else FAILURE


def cmd_constants(args) -> int:
    if not args.pairs:
        print("error: no (n,k) pairs given", file=sys.stderr)
        return USAGE_ERROR
    pairs = []
    try:
        for token in args.pairs:
            for chunk in token.split(";"):
                if not chunk:
                    continue
                n_s, k_s, *rest = chunk.split(",")
                p = float(rest[0]) if rest else None
                pairs.append((int(n_s), int(k_s), p))
    except ValueError:
        print("error: pairs must look like 'n,k' or 'n,k,p'", file=sys.stderr)
        return USAGE_ERROR
    if not pairs:
        print("error: empty pair list", file=sys.stderr)
        return USAGE_ERROR
    rows = []
    reports = []
    code = OK
    for (n, k, p) in pairs:
        try:
            rep = compare_constants(n, k, p)
        except (ValueError, ArithmeticError) as exc:
            print(f"constants failure at (n={n}, k={k}): {exc}", file=sys.stderr)
            return FAILURE
        reports.append(rep)
        rows.append([rep.n, rep.k, rep.p, rep.S_value, rep.C_value, rep.margin, rep.verdict])
        if rep.verdict != "PASS":
            code = FAILURE
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "constants.csv", ["n", "k", "p", "S", "C", "margin", "verdict"], rows)
    doc = report_document({"pairs": [[n, k, p] for n, k, p in pairs]},
                          {"rows": [r.__dict__ for r in reports]})
    write_json(out_dir / "constants.json", doc)
    for r in rows:
        print(" ".join(fmt_number(v) if isinstance(v, float) else str(v) for v in r))
    return code


def cmd_kernel(args) -> int:
    if args.n <= 2 * args.k:
        print(f"error: need n > 2k (n={args.n}, k={args.k})", file=sys.stderr)
        return USAGE_ERROR
    grid = kernel_grid(args.n, rho_max=args.rho_max)
    try:
        K = gk_inverse_kernel(args.k, args.n, grid, route=args.route)
    except (ValueError, ArithmeticError) as exc:
        print(f"kernel failure: {exc}", file=sys.stderr)
        return FAILURE
    rep = monotonicity_certificate(K)
    export_kernel_csv(K, args.out)
    print(f"kernel written to {args.out}; monotone={rep.passed} min_decrement={fmt_number(rep.min_decrement)}")
    return OK if rep.passed else FAILURE


def cmd_transform(args) -> int:
    path = Path(args.profile)
    if not path.exists():
        print(f"error: profile file {path} not found", file=sys.stderr)
        return USAGE_ERROR
    rho, vals = [], []
    with open(path) as fh:
        rd = csv.reader(fh)
        header = next(rd)
        for row in rd:
            rho.append(float(row[0]))
            vals.append(float(row[1]))
    rho = np.asarray(rho)
    vals = np.asarray(vals)
    grid = transform_grid(args.n, rho_max=min(float(rho[-1]), 15.0),
                          panels_log=15, panels_lin=70, order=12)
    f = RadialProfile(grid, np.interp(grid.rho, rho, vals))
    tr = RadialTransformer(grid, frequency_grid(args.n, lambda_max=40.0, panels=48, order=12))
    try:
        F = tr.forward(f)
        g = tr.inverse(F)
    except ValueError as exc:
        print(f"transform failure: {exc}", file=sys.stderr)
        return FAILURE
    err = float(np.sqrt(np.sum(grid.volume_weights * (g.values - f.values) ** 2))) / f.l2_norm()
    plan = abs(f.l2_norm() ** 2 - F.norm_sq()) / f.l2_norm() ** 2
    print(f"roundtrip relative L2 error: {fmt_number(err)}")
    print(f"plancherel identity relative error: {fmt_number(plan)}")
    return OK if (err < args.tol and plan < args.tol) else FAILURE


def cmd_rearrange(args) -> int:
    n = 3
    rng = np.random.default_rng(args.seed)
    grid_k = kernel_grid(n, rho_max=14.0)
    K = resolvent_kernel(0.25, n, grid_k)
    center = np.zeros(3)
    center[0] = 0.35
    r0 = 1.0

    def h_func(pts):
        from .geometry import pairwise_distance
        return (pairwise_distance(pts, np.broadcast_to(center, pts.shape)) < r0).astype(float)

    rstar = ball_volume_inverse(n, ball_volume(n, r0))

    def h_star(rho):
        return (rho < rstar).astype(float)

    rep = symmetrization_gap(h_func, h_star, K, n, rho_max=6.0,
                             samples=args.samples, seed=args.seed)
    doc = report_document({"seed": args.seed, "samples": args.samples, "n": n},
                          {"bilinear_original": rep.bilinear_original,
                           "bilinear_rearranged": rep.bilinear_rearranged,
                           "gap": rep.gap, "gap_stderr": rep.gap_stderr,
                           "passes": rep.passes})
    out = Path(args.out) if args.out else Path("rearrange.json")
    write_json(out, doc)
    print(f"gap = {fmt_number(rep.gap)} +- {fmt_number(rep.gap_stderr)} -> "
          f"{'PASS' if rep.passes else 'FAIL'}")
    return OK if rep.passes else FAILURE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperball",
                                 description="hyperbolic-ball sharp-constant laboratory")
    ap.add_argument("--version", action="version", version=f"hyperball {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="compute an extremal profile")
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--p", type=float)
    s.add_argument("--L", type=float)
    s.add_argument("--N", type=int)
    s.add_argument("--tol", type=float)
    s.add_argument("--max-iter", dest="max_iter", type=int)
    s.add_argument("--damping", type=float)
    s.add_argument("--seed-profile", dest="seed_profile")
    s.add_argument("--config")
    s.add_argument("--out", default="solve_out")
    s.add_argument("--json-only", action="store_true")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("suite")
    v.add_argument("--k", type=int)
    v.add_argument("--n", type=int)
    v.add_argument("--k-max", dest="k_max", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("constants", help="S vs C comparison table")
    c.add_argument("--pairs", nargs="*", default=[])
    c.add_argument("--out", default="constants_out")
    c.set_defaults(func=cmd_constants)

    kk = sub.add_parser("kernel", help="dump an inverse-operator kernel profile")
    kk.add_argument("--k", type=int, required=True)
    kk.add_argument("--n", type=int, required=True)
    kk.add_argument("--route", choices=["spectral", "convolution"], default="spectral")
    kk.add_argument("--rho-max", dest="rho_max", type=float, default=8.0)
    kk.add_argument("--out", default="kernel.csv")
    kk.set_defaults(func=cmd_kernel)

    t = sub.add_parser("transform", help="roundtrip test on a profile CSV (rho,f)")
    t.add_argument("--profile", required=True)
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--tol", type=float, default=1e-5)
    t.set_defaults(func=cmd_transform)

    r = sub.add_parser("rearrange", help="Monte Carlo symmetrization test")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--samples", type=int, default=100000)
    r.add_argument("--out")
    r.set_defaults(func=cmd_rearrange)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already
        return int(exc.code) if exc.code is not None else USAGE_ERROR
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
