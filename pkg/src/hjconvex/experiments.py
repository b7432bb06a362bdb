"""Benchmark runner for the five reference problems.

A run samples the boundary data, perturbs it, minimises the objective
from ``u = 0`` and scores the result against the known solution with the
relative max-norm error over all grid nodes.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from hjconvex.carleman import CarlemanParams
from hjconvex.grid import ConfigurationError, Grid, linf_rel_error, make_grid
from hjconvex.hamiltonian import Problem, builtin_problem
from hjconvex.noise import NoiseSpec, apply_noise
from hjconvex.objective import Objective, ObjectiveConfig
from hjconvex.optimizer import DescentConfig, DescentTrace, gradient_descent

DEFAULTS = {
    "R": 1.0,
    "N": 50,
    "eps0": 1e-3,
    "lam": 2.0,
    "beta": 8.0,
    "b": 10.0,
    "r": 1.2,
    "eta": 1e-4,
}
QUICK_N = 26

# relative max-norm errors reported for the reference runs, by test and noise level
PAPER_ERRORS = {
    1: {0.0: 0.0024, 0.05: 0.0451, 0.10: 0.0995},
    2: {0.0: 0.0375, 0.05: 0.0523, 0.10: 0.1222},
    3: {0.0: 0.0132, 0.05: 0.0204, 0.10: 0.0397},
    4: {0.0: 0.0091, 0.05: 0.0497, 0.10: 0.0999},
    5: {0.0: 0.0178, 0.05: 0.0497, 0.10: 0.0977},
}

NOISELESS_LIMITS = {1: 0.01, 2: 0.075, 3: 0.03, 4: 0.03, 5: 0.04}
_TEST1_NOISY_LIMITS = {0.05: 0.10, 0.10: 0.16}

RESULT_COLUMNS = ["test", "delta", "seed", "err_linf_rel", "iters", "seconds", "final_J"]


def _noise_key(delta: float) -> float:
    return round(float(delta), 6)


def error_limit(test_id: int, delta: float, quick: bool = False) -> float | None:
    """Accepted error for ``(test, delta)`` at default parameters.

    Noiseless limits are fixed per test. Noisy limits take the test-1 ratio
    of limit to reference error at the same ``delta`` and apply it to the
    test's own reference error. ``quick`` doubles every limit. Returns
    ``None`` for noise levels without a reference value.
    """
    d = _noise_key(delta)
    if d == 0.0:
        limit = NOISELESS_LIMITS[test_id]
    elif d in _TEST1_NOISY_LIMITS:
        scale = _TEST1_NOISY_LIMITS[d] / PAPER_ERRORS[1][d]
        limit = scale * PAPER_ERRORS[test_id][d]
    else:
        return None
    return 2.0 * limit if quick else limit


def resolve_parameters(overrides: dict | None = None, quick: bool = False) -> dict:
    params = dict(DEFAULTS)
    if quick:
        params["N"] = QUICK_N
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in DEFAULTS:
            raise ConfigurationError(f"unknown parameter override {key!r}")
        params[key] = type(DEFAULTS[key])(value)
    return params


def build_objective(problem: Problem, params: dict, delta: float = 0.0, seed: int = 0,
                    use_neumann: bool | None = None) -> tuple[Grid, Objective]:
    """Grid and objective with (possibly noisy) boundary data."""
    grid = make_grid(params["R"], params["N"])
    carleman = CarlemanParams(lam=params["lam"], beta=params["beta"], r=params["r"], b=params["b"],
                              R=params["R"], permissive=True)
    config = ObjectiveConfig(eps0=params["eps0"], eta=params["eta"], carleman=carleman)
    if use_neumann is None:
        use_neumann = problem.has_neumann

    f_field = grid.sample(problem.dirichlet)
    mask = grid.boundary_mask()
    g = None
    if use_neumann:
        g = np.broadcast_to(problem.neumann(grid.x, grid.R), (grid.N,)).astype(float)
    f_noisy, g_noisy = apply_noise(f_field[mask], g, NoiseSpec(delta, seed))
    boundary = np.zeros(grid.shape)
    boundary[mask] = f_noisy
    objective = Objective(problem, grid, config, boundary=boundary, neumann_data=g_noisy,
                          use_neumann=use_neumann)
    return grid, objective


def pointwise_error_field(u_comp: np.ndarray, u_true: np.ndarray) -> np.ndarray:
    """``|u_comp - u_true| / max|u_true|`` at every node."""
    denom = float(np.max(np.abs(u_true)))
    if denom == 0.0:
        raise ZeroDivisionError("true solution is identically zero")
    return np.abs(np.asarray(u_comp) - np.asarray(u_true)) / denom


@dataclass
class TestResult:
    test: int
    delta: float
    seed: int
    err: float
    iters: int
    seconds: float
    final_J: float
    status: str
    params: dict
    u_comp: np.ndarray = field(repr=False)
    u_true: np.ndarray = field(repr=False)
    trace: DescentTrace = field(repr=False)
    paths: dict = field(default_factory=dict)
    message: str = ""

    __test__ = False  # not a pytest class

    @property
    def failed(self) -> bool:
        return self.status == "diverged"

    def row(self, timing: bool = True) -> list:
        return [self.test, repr(float(self.delta)), self.seed, repr(self.err), self.iters,
                repr(self.seconds if timing else 0.0), repr(self.final_J)]

    def error_field(self) -> np.ndarray:
        return pointwise_error_field(self.u_comp, self.u_true)


def write_field_csv(path, grid: Grid, values: np.ndarray):
    """Write ``i, j, x, z, value`` rows with 1-based node indices."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "j", "x", "z", "value"])
        for i in range(grid.N):
            for j in range(grid.N):
                writer.writerow([i + 1, j + 1, repr(float(grid.x[i])), repr(float(grid.z[j])),
                                 repr(float(values[i, j]))])


def dump_result(result: TestResult, out_dir, timing: bool = True) -> dict:
    out = Path(out_dir) / f"test{result.test}_delta{result.delta:g}_seed{result.seed}"
    out.mkdir(parents=True, exist_ok=True)
    grid = make_grid(result.params["R"], result.params["N"])
    paths = {
        "u_comp": out / "u_comp.csv",
        "u_true": out / "u_true.csv",
        "error": out / "rel_error.csv",
        "trace": out / "trace.csv",
        "meta": out / "meta.json",
    }
    write_field_csv(paths["u_comp"], grid, result.u_comp)
    write_field_csv(paths["u_true"], grid, result.u_true)
    write_field_csv(paths["error"], grid, result.error_field())
    result.trace.write_csv(paths["trace"], timing=timing)
    meta = {
        "test": result.test,
        "delta": result.delta,
        "seed": result.seed,
        "params": result.params,
        "err_linf_rel": result.err,
        "iters": result.iters,
        "final_J": result.final_J,
        "status": result.status,
        "message": result.message,
        "seconds": result.seconds if timing else 0.0,
    }
    paths["meta"].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    result.paths = {k: str(v) for k, v in paths.items()}
    return result.paths


def run_test(test_id: int, delta: float = 0.0, seed: int = 0, overrides: dict | None = None,
             quick: bool = False, descent: DescentConfig | None = None, out_dir=None,
             timing: bool = True) -> TestResult:
    if test_id not in PAPER_ERRORS:
        raise ConfigurationError(f"benchmark id must be 1..5, got {test_id}")
    params = resolve_parameters(overrides, quick)
    problem = builtin_problem(test_id)
    grid, objective = build_objective(problem, params, delta, seed)

    t0 = time.perf_counter()
    v, trace = gradient_descent(objective.initial_guess(), objective, descent)
    seconds = time.perf_counter() - t0

    u_comp = objective.embed(v)
    u_true = grid.sample(problem.true_solution)
    result = TestResult(
        test=test_id, delta=float(delta), seed=int(seed),
        err=linf_rel_error(u_comp, u_true), iters=trace.n_iters, seconds=seconds,
        final_J=trace.J[-1] if trace.J else math.nan, status=trace.status,
        params=params, u_comp=u_comp, u_true=u_true, trace=trace, message=trace.message,
    )
    if out_dir is not None:
        dump_result(result, out_dir, timing=timing)
    return result


@dataclass
class SuiteResult:
    rows: list[TestResult]
    failures: list[tuple[tuple, str]] = field(default_factory=list)

    def medians(self) -> dict:
        cells: dict = {}
        for r in self.rows:
            if not r.failed:
                cells.setdefault((r.test, _noise_key(r.delta)), []).append(r.err)
        return {key: statistics.median(errs) for key, errs in sorted(cells.items())}

    def write_csv(self, path, timing: bool = True):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESULT_COLUMNS)
            for r in self.rows:
                writer.writerow(r.row(timing))

    def write_medians_csv(self, path):
        counts: dict = {}
        for r in self.rows:
            if not r.failed:
                key = (r.test, _noise_key(r.delta))
                counts[key] = counts.get(key, 0) + 1
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["test", "delta", "runs", "median_err_linf_rel"])
            for (test, delta), med in self.medians().items():
                writer.writerow([test, repr(delta), counts[(test, delta)], repr(med)])


def _run_cell(args):
    test_id, delta, seed, overrides, quick, descent, out_dir, timing = args
    try:
        return run_test(test_id, delta, seed, overrides, quick, descent, out_dir, timing), None
    except Exception as exc:  # noqa: BLE001 - a failed cell must not stop the suite
        return None, f"{type(exc).__name__}: {exc}"


def run_suite(ids, deltas, seeds, overrides: dict | None = None, quick: bool = False,
              descent: DescentConfig | None = None, out_dir=None, timing: bool = True,
              workers: int = 1) -> SuiteResult:
    """Run every ``(id, delta, seed)`` combination; rows keep product order."""
    cells = list(product(ids, deltas, seeds))
    jobs = [(int(t), float(d), int(s), overrides, quick, descent, out_dir, timing) for t, d, s in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_cell, jobs))
    else:
        outcomes = [_run_cell(job) for job in jobs]
    suite = SuiteResult(rows=[])
    for cell, (result, err) in zip(cells, outcomes):
        if result is None:
            suite.failures.append((cell, err))
        else:
            suite.rows.append(result)
            if result.failed:
                suite.failures.append((cell, result.message or "diverged"))
    return suite


def acceptance_violations(suite: SuiteResult, quick: bool = False) -> list[str]:
    """Error-envelope violations of the suite's median errors."""
    problems = [f"run {cell} failed: {msg}" for cell, msg in suite.failures]
    for (test, delta), med in suite.medians().items():
        limit = error_limit(test, delta, quick)
        if limit is not None and med > limit:
            problems.append(f"test {test} delta {delta:g}: median error {med:.4f} exceeds {limit:.4f}")
        if delta > 0:
            band = delta + 0.06
            if quick:
                band *= 2.0
            if med > band:
                problems.append(f"test {test} delta {delta:g}: median error {med:.4f} above delta+0.06")
    return problems
