"""Command-line front end.

Subcommands: kernel | wave | solve | sweep | oracle.  Every run echoes its
fully resolved configuration into the output header (CSV comment block /
leading JSON keys) so results are reproducible byte for byte.

Exit codes: 0 all checks passed, 1 a verification failed or a solver
diverged, 2 usage or configuration error.
"""

import argparse
import math
import sys

import numpy as np

from . import __version__
from . import estimates, fd_oracle, io, kernel, model, table, volterra, waves
from ._accel import using_numba


def _add_medium_args(p):
    p.add_argument("--eps", type=float, default=None, help="diffusion coefficient")
    p.add_argument("--a", type=float, default=None, help="damping coefficient")
    p.add_argument("--c", type=float, default=None, help="wave speed")
    p.add_argument("--gamma", type=float, default=None, help="source bias")


def _add_grid_args(p):
    p.add_argument("--x-min", type=float, default=None)
    p.add_argument("--x-max", type=float, default=None)
    p.add_argument("--nx", type=int, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--nt", type=int, default=None)


_MEDIUM_DEFAULTS = {"epsilon": 0.01, "a": 1.0, "c": 1.0, "gamma": 0.0}
_GRID_DEFAULTS = {"x_min": -30.0, "x_max": 30.0, "nx": 241, "t_max": 2.0, "nt": 101}


def _resolve(args):
    """Merge defaults, config file, and flags (flags win)."""
    cfg = dict(_MEDIUM_DEFAULTS)
    cfg.update(_GRID_DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg.update(model.parse_config_text(fh.read()))
    flag_map = {"epsilon": "eps", "a": "a", "c": "c", "gamma": "gamma",
                "x_min": "x_min", "x_max": "x_max", "nx": "nx",
                "t_max": "t_max", "nt": "nt"}
    for key, flag in flag_map.items():
        val = getattr(args, flag, None)
        if val is not None:
            cfg[key] = val
    params = model.MediumParams(cfg["epsilon"], cfg["a"], cfg["c"], cfg["gamma"])
    grid = model.SpaceTimeGrid(cfg["x_min"], cfg["x_max"], cfg["nx"],
                               cfg["t_max"], cfg["nt"])
    return params, grid, cfg


def _echo_config(cfg, args, extra=None):
    out = dict(cfg)
    out["seed"] = args.seed
    out["numba"] = using_numba()
    if extra:
        out.update(extra)
    return out


def _report(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def cmd_kernel(args):
    params, grid, cfg = _resolve(args)
    config = _echo_config(cfg, args)
    tab = table.build_kernel_table(params, grid, mode="pointwise")
    if args.out:
        x_off = tab.offsets
        rows = [(x_off[d], tab.lags[l], tab.values[d, l])
                for d in range(grid.nx) for l in range(grid.nt)]
        if args.format == "json":
            io.write_json(args.out, {"columns": ["x", "t", "K"],
                                     "rows": [[float(v) for v in r] for r in rows]}, config)
        else:
            io.write_csv(args.out, ("x", "t", "K"), rows, config)
    if not args.verify:
        return 0
    ok = True
    quad = kernel.QuadratureSpec()
    r_set = (0.0, 1.0)
    s_set = (0.5, 2.0)
    try:
        worst = max(kernel.verify_laplace_pair(r, s_set, params, quad) for r in r_set)
        ok &= _report("laplace-pair", worst < 1e-6, f"max rel err {worst:.2e} (< 1e-6)")
    except kernel.QuadratureError as exc:
        ok &= _report("laplace-pair", False, str(exc))
    try:
        worst = 0.0
        for tv in (0.5 / params.a, 1.0 / params.a, 2.0 / params.a):
            got = kernel.kernel_mass(tv, params, quad)
            want = kernel.kernel_mass_exact(tv, params)
            worst = max(worst, abs(got - want) / want)
        ok &= _report("kernel-mass", worst < 1e-5, f"max rel err {worst:.2e} (< 1e-5)")
    except kernel.QuadratureError as exc:
        ok &= _report("kernel-mass", False, str(exc))
    h = min(0.02, 0.2 * grid.t_max)
    x_eval = 0.5 * params.c * grid.t_max
    t_eval = 0.6 * grid.t_max
    r1 = kernel.pde_residual(x_eval, t_eval, params, h)
    r2 = kernel.pde_residual(x_eval, t_eval, params, 0.5 * h)
    ratio = abs(r1) / max(abs(r2), 1e-300)
    ok &= _report("pde-residual", 3.0 <= ratio <= 5.5,
                  f"Richardson ratio {ratio:.2f} (target ~4)")
    if params.dissipative_regime:
        mn = float(tab.values.min())
        ok &= _report("nonnegativity", mn >= -1e-10, f"table min {mn:.2e} (>= -1e-10)")
    else:
        _report("nonnegativity", True, "skipped: a >= b (sign theorem needs a < b)")
    return 0 if ok else 1


def cmd_wave(args):
    params, grid, cfg = _resolve(args)
    gamma = params.gamma
    wave = waves.TravellingWave.create(gamma, params.a, args.k)
    config = _echo_config(cfg, args, {"k_const": args.k})
    rows, n_singular = waves.wave_table(wave, grid)
    if args.out:
        if args.format == "json":
            io.write_json(args.out, {"columns": ["x", "t", "w", "w_t", "w_xxt"],
                                     "rows": [[float(v) for v in r] for r in rows]},
                          config)
        else:
            io.write_csv(args.out, ("x", "t", "w", "w_t", "w_xxt"), rows, config)
    if n_singular:
        print(f"warning: {n_singular} singular grid nodes "
              f"({wave.singular_locus()}) written as NaN")
    code = 0
    if args.verify:
        rng = np.random.default_rng(args.seed)
        worst = 0.0
        count = 0
        while count < 1000:
            x = rng.uniform(grid.x_min, grid.x_max)
            t = rng.uniform(0.0, grid.t_max)
            try:
                res = waves.reduced_residual(wave, x, t)
            except waves.SingularPointError:
                continue
            if not math.isfinite(res) or abs(res) > 1e3:
                continue  # too close to a pole for a meaningful residual
            worst = max(worst, abs(res))
            count += 1
        okv = worst < 1e-8
        _report("reduced-residual", okv, f"max |residual| {worst:.2e} (< 1e-8)")
        if not okv:
            code = 1
    if args.strict and n_singular:
        code = 1
    return code


def cmd_solve(args):
    params, grid, cfg = _resolve(args)
    wave = waves.TravellingWave.create(params.gamma, params.a, args.k)
    pconf = volterra.PicardConfig(max_iters=args.max_iters, fix_tol=args.fix_tol,
                                  window_len=args.window)
    config = _echo_config(cfg, args, {"k_const": args.k, "fix_tol": args.fix_tol,
                                      "max_iters": args.max_iters,
                                      "window_len": args.window})
    try:
        v, rep = volterra.picard_solve(wave, params, grid, config=pconf)
    except volterra.DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"contraction ratios: {exc.ratios}", file=sys.stderr)
        return 1
    if args.out:
        if args.format == "json":
            io.write_json(args.out, rep.to_dict(params, grid), config)
        else:
            x, t = grid.x, grid.t
            rows = [(x[i], t[n], v.values[i, n])
                    for i in range(grid.nx) for n in range(grid.nt)]
            io.write_csv(args.out, ("x", "t", "v"), rows, config)
            io.write_json(args.out + ".report.json", rep.to_dict(params, grid), config)
    print(f"converged in {rep.iterations} iterations/window; "
          f"max r = {float(np.max(rep.sup_history[:, 1])):.6e}")
    return 0


def cmd_sweep(args):
    params, grid, cfg = _resolve(args)
    try:
        eps_list = tuple(sorted((float(s) for s in args.eps_list.split(",") if s),
                                reverse=True))
        beta = waves.w_xxt_bound(params.a)
        layer = estimates.LayerParams(beta=beta, a=params.a, k_exp=args.k_exp,
                                      epsilon_list=eps_list)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    wave = waves.TravellingWave.create(0.0, params.a, 0.0)
    config = _echo_config(cfg, args, {"k_exp": args.k_exp, "beta": beta,
                                      "epsilon_list": list(eps_list)})
    reports = estimates.verify_order(params, wave, grid, layer, threads=args.threads)
    if args.out:
        io.write_json(args.out, {"reports": [r.to_dict() for r in reports]}, config)
        stem = args.out[:-5] if args.out.endswith(".json") else args.out
        rows = [(r.epsilon,
                 r.T_eps if math.isfinite(r.T_eps) else math.nan,
                 r.max_r, r.gronwall_uniform, r.eps_k,
                 1.0 if r.bound_satisfied else 0.0) for r in reports]
        io.write_csv(stem + ".summary.csv",
                     ("epsilon", "T_eps", "max_r", "gronwall", "eps_k", "pass"),
                     rows, config)
    code = 0
    for r in reports:
        if not r.horizon_reached:
            print(f"eps={r.epsilon:g}: horizon not reached ({r.error})")
            continue
        if r.error:
            print(f"eps={r.epsilon:g}: FAIL {r.error}")
            code = 1
            continue
        status = "PASS" if r.bound_satisfied else "FAIL"
        print(f"eps={r.epsilon:g}: {status} max_r={r.max_r:.4e} "
              f"eps^k={r.eps_k:.4e} T_eps={r.T_eps:.4g}")
        if not r.bound_satisfied:
            code = 1
    slope = next((r.slope for r in reports if r.slope is not None), None)
    if slope is not None:
        print(f"fitted slope of log(max r) vs log(eps): {slope:.4f}")
    return code


def cmd_oracle(args):
    params, grid, cfg = _resolve(args)
    wave = waves.TravellingWave.create(params.gamma, params.a, args.k)
    config = _echo_config(cfg, args, {"k_const": args.k, "refine_x": args.refine_x})
    try:
        rep = fd_oracle.cross_validate(params, wave, grid, refine_x=args.refine_x)
    except (fd_oracle.InstabilityError, volterra.DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        io.write_json(args.out, rep, config)
    ok = rep["passed"]
    _report("cross-validate", ok,
            f"sup discrepancy {rep['sup_discrepancy']:.3e} (< {rep['tolerance']:.1e})")
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="psglab",
        description="numerical laboratory for the viscously perturbed sine-Gordon equation")
    parser.add_argument("--version", action="version", version=f"psglab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="flat key=value config file")
        p.add_argument("--out", default=None, help="output path ('-' for stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--verify", action="store_true", help="run built-in checks")
        p.add_argument("--strict", action="store_true")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        _add_medium_args(p)
        _add_grid_args(p)

    p = sub.add_parser("kernel", help="tabulate and verify the fundamental solution")
    common(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("wave", help="tabulate travelling waves, check the reduced equation")
    common(p)
    p.add_argument("--k", type=float, default=0.0, help="integration constant")
    p.set_defaults(func=cmd_wave)

    p = sub.add_parser("solve", help="solve the remainder equation for one epsilon")
    common(p)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--fix-tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--window", type=float, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="epsilon sweep verifying the eps^k boundary-layer claim")
    common(p)
    p.add_argument("--eps-list", default="1e-2,1e-3,1e-4")
    p.add_argument("--k-exp", type=float, default=0.5)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="cross-validate against the finite-difference solver")
    common(p)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--refine-x", type=int, default=5)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
