"""Command-line interface: ``hjconvex {bench,solve,check-carleman}``.

Timing columns are written as 0 unless ``--timing`` is given, so repeated
invocations with the same arguments produce byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import csv
import importlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from hjconvex import kernels
from hjconvex.carleman import CarlemanParams, admissible_function, random_smooth_factor, verify_carleman
from hjconvex.experiments import (
    acceptance_violations,
    build_objective,
    resolve_parameters,
    run_suite,
    write_field_csv,
    pointwise_error_field,
)
from hjconvex.grid import ConfigurationError, linf_rel_error, make_grid
from hjconvex.hamiltonian import Problem, builtin_problem
from hjconvex.optimizer import DescentConfig, gradient_descent

log = logging.getLogger("hjconvex")


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(" ", "").split(",") if tok]


def _id_list(text: str) -> list[int]:
    ids = []
    for tok in text.split(","):
        if ".." in tok:
            lo, hi = tok.split("..")
            ids.extend(range(int(lo), int(hi) + 1))
        elif tok:
            ids.append(int(tok))
    return ids


def _add_model_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("model parameters (defaults: R=1 N=50 eps0=1e-3 lambda=2 beta=8 b=10 r=1.2 eta=1e-4)")
    g.add_argument("--R", type=float)
    g.add_argument("--N", type=int)
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--b", type=float)
    g.add_argument("--r", type=float)
    g.add_argument("--eta", type=float)
    g.add_argument("--eps0", type=float)
    g.add_argument("--quick", action="store_true", help=f"coarse grid (N=26) with doubled error limits")


def _add_descent_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("descent")
    g.add_argument("--mode", choices=["armijo", "fixed"], default="armijo")
    g.add_argument("--kappa", type=float, default=1.0, help="fixed step, or initial Armijo trial step")
    g.add_argument("--max-iters", type=int, default=20000)
    g.add_argument("--grad-tol", type=float, default=None)
    g.add_argument("--timing", action="store_true", help="record wall-clock times in CSV output")


def _overrides(args) -> dict:
    return {k: getattr(args, k) for k in ("R", "N", "lam", "beta", "b", "r", "eta", "eps0")}


def _descent(args) -> DescentConfig:
    return DescentConfig(mode=args.mode, kappa=args.kappa, max_iters=args.max_iters, grad_tol=args.grad_tol)


def cmd_bench(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    suite = run_suite(args.test, args.noise, args.seed, overrides=_overrides(args), quick=args.quick,
                      descent=_descent(args), out_dir=out, timing=args.timing, workers=args.workers)
    suite.write_csv(out / "results.csv", timing=args.timing)
    suite.write_medians_csv(out / "medians.csv")
    for r in suite.rows:
        print(f"test {r.test}  delta {r.delta:<5g} seed {r.seed:<4d} err {r.err:.4%}  "
              f"iters {r.iters:<6d} {r.status}")
    for cell, msg in suite.failures:
        print(f"FAILED {cell}: {msg}", file=sys.stderr)
    if args.assert_:
        problems = acceptance_violations(suite, quick=args.quick)
        for msg in problems:
            print(f"VIOLATION {msg}", file=sys.stderr)
        return 1 if problems else 0
    return 1 if suite.failures else 0


def _load_problem(spec: str, mu: float) -> Problem:
    if ":" in spec:
        module, attr = spec.split(":", 1)
        try:
            obj = getattr(importlib.import_module(module), attr)
            problem = obj() if callable(obj) and not isinstance(obj, Problem) else obj
        except (ImportError, AttributeError, TypeError) as exc:
            raise ConfigurationError(f"cannot load problem {spec}: {exc}") from exc
        if not isinstance(problem, Problem):
            raise ConfigurationError(f"{spec} did not provide a Problem")
        return problem
    return builtin_problem(spec, smoothing_mu=mu)


def cmd_solve(args) -> int:
    problem = _load_problem(args.problem, args.mu)
    params = resolve_parameters(_overrides(args), args.quick)
    use_neumann = problem.has_neumann and not args.no_neumann
    grid, objective = build_objective(problem, params, args.noise, args.seed, use_neumann=use_neumann)
    v, trace = gradient_descent(objective.initial_guess(), objective, _descent(args))
    u = objective.embed(v)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_field_csv(out / "u_comp.csv", grid, u)
    trace.write_csv(out / "trace.csv", timing=args.timing)
    meta = {"problem": problem.name, "id": problem.id, "params": params, "delta": args.noise,
            "seed": args.seed, "neumann": use_neumann, "iters": trace.n_iters,
            "final_J": trace.J[-1] if trace.J else None, "status": trace.status,
            "message": trace.message, "backend": kernels.BACKEND}
    if problem.true_solution is not None:
        u_true = grid.sample(problem.true_solution)
        write_field_csv(out / "u_true.csv", grid, u_true)
        write_field_csv(out / "rel_error.csv", grid, pointwise_error_field(u, u_true))
        meta["err_linf_rel"] = linf_rel_error(u, u_true)
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    msg = f"{problem.name}: {trace.status} after {trace.n_iters} iterations, J={meta['final_J']:.6e}"
    if "err_linf_rel" in meta:
        msg += f", relative error {meta['err_linf_rel']:.4%}"
    print(msg)
    return 0 if trace.status != "diverged" else 1


def cmd_check_carleman(args) -> int:
    params = CarlemanParams(lam=1.0, beta=args.beta, r=args.r, b=args.b, R=args.R, permissive=args.permissive)
    grid = make_grid(args.R, args.N)
    rng = np.random.default_rng(args.seed)
    funcs = [admissible_function(None, args.R)]
    funcs += [admissible_function(random_smooth_factor(rng), args.R) for _ in range(args.functions - 1)]
    rows = []
    for idx, fn in enumerate(funcs):
        report = verify_carleman(fn, params, args.lambda_list, grid)
        for rec in report.records:
            rows.append([idx, repr(rec.lam), repr(rec.lhs), repr(rec.rhs_u), repr(rec.rhs_grad),
                         repr(rec.rhs), "" if rec.ratio is None else repr(rec.ratio)])
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["function", "lambda", "lhs", "rhs_u", "rhs_grad", "rhs", "ratio"])
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    ratios = [float(r[-1]) for r in rows if r[-1]]
    ok = bool(ratios) and min(ratios) > 0
    print(f"min ratio {min(ratios):.6g} over {len(funcs)} functions" if ratios else "degenerate",
          file=sys.stderr)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hjconvex", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="run benchmark tests 1..5")
    p.add_argument("--test", type=_id_list, default=[1, 2, 3, 4, 5], help="ids, e.g. 1,3 or 1..5")
    p.add_argument("--noise", type=_float_list, default=[0.0], help="noise levels, e.g. 0,0.05,0.1")
    p.add_argument("--seed", type=lambda s: [int(t) for t in s.split(",")], default=[0])
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--assert", dest="assert_", action="store_true",
                   help="exit nonzero if any median error exceeds its acceptance limit")
    _add_model_options(p)
    _add_descent_options(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("solve", help="solve one problem and dump the fields")
    p.add_argument("--problem", required=True, help="id 1..6, a built-in name, or module:attribute")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mu", type=float, default=0.0, help="smoothing of |.| in built-in Hamiltonians")
    p.add_argument("--no-neumann", action="store_true", help="ignore Neumann data even if available")
    p.add_argument("--out", default="solution")
    _add_model_options(p)
    _add_descent_options(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check-carleman", help="probe the weighted Laplacian estimate")
    p.add_argument("--lambda-list", type=_float_list, default=[5.0, 10.0, 20.0, 40.0])
    p.add_argument("--beta", type=float, default=8.0)
    p.add_argument("--r", type=float, default=2.5)
    p.add_argument("--b", type=float, default=4.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--N", type=int, default=50)
    p.add_argument("--functions", type=int, default=20, help="size of the admissible test family")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--permissive", action="store_true", help="allow r <= R+1 or b <= R+r")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_check_carleman)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
