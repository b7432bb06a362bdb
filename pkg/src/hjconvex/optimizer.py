"""Gradient descent ``u_k = u_{k-1} - kappa grad J(u_{k-1})``.

Two step policies:

* ``"fixed"``: constant ``kappa``; aborts if ``J`` rises three iterations
  in a row.
* ``"armijo"``: backtracking from the previous accepted step times
  ``growth``, accepting the first trial with
  ``J(u - t g) <= J(u) - c1 t |g|^2``.

The objective handle is any object with ``value(v)`` and
``value_and_gradient(v)``; :class:`hjconvex.objective.Objective` is one.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from hjconvex.grid import ConfigurationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DescentConfig:
    mode: str = "armijo"
    kappa: float = 1.0
    c1: float = 1e-4
    backtrack: float = 0.5
    growth: float = 2.0
    max_backtracks: int = 60
    max_iters: int = 20000
    grad_tol: float | None = None
    J_rel_tol: float = 1e-12
    log_every: int = 0
    max_snapshots: int = 256

    def __post_init__(self):
        if self.mode not in ("armijo", "fixed"):
            raise ConfigurationError(f"unknown step mode {self.mode!r}")
        if not self.kappa > 0:
            raise ConfigurationError("kappa must be positive")
        if not 0 < self.c1 < 1:
            raise ConfigurationError("Armijo constant c1 must lie in (0, 1)")
        if not 0 < self.backtrack < 1:
            raise ConfigurationError("backtrack factor must lie in (0, 1)")
        if self.growth < 1:
            raise ConfigurationError("growth factor must be >= 1")
        if self.grad_tol is not None and not self.grad_tol > 0:
            raise ConfigurationError("grad_tol must be positive")
        if not self.J_rel_tol > 0:
            raise ConfigurationError("J_rel_tol must be positive")
        if self.max_iters < 0 or self.max_snapshots < 4:
            raise ConfigurationError("max_iters must be >= 0 and max_snapshots >= 4")


@dataclass
class DescentTrace:
    """Per-iteration history. Row ``k`` describes iterate ``u_k``
    (``k = 0`` is the initial guess, with step 0 and distance 0)."""

    iters: list[int] = field(default_factory=list)
    J: list[float] = field(default_factory=list)
    grad_inf: list[float] = field(default_factory=list)
    step: list[float] = field(default_factory=list)
    move: list[float] = field(default_factory=list)
    elapsed: list[float] = field(default_factory=list)
    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)
    status: str = "running"
    message: str = ""
    _stride: int = field(default=1, repr=False)

    @property
    def n_iters(self) -> int:
        return self.iters[-1] if self.iters else 0

    def record(self, k, J, grad_inf, step, move, elapsed):
        self.iters.append(k)
        self.J.append(J)
        self.grad_inf.append(grad_inf)
        self.step.append(step)
        self.move.append(move)
        self.elapsed.append(elapsed)

    def snapshot(self, k: int, v: np.ndarray, cap: int, force: bool = False):
        """Keep ``v`` if ``k`` is on the current stride; the stride doubles
        whenever more than ``cap`` snapshots are held."""
        if not force and k % self._stride:
            return
        kept = self.snapshots + [(k, v.copy())]
        if len(kept) > cap:
            self._stride *= 2
            kept = [(j, u) for j, u in kept if j % self._stride == 0]
            if force and kept[-1][0] != k:
                kept.append((k, v.copy()))
        self.snapshots = kept

    def write_csv(self, path, timing: bool = True):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iter", "J", "grad_inf", "step", "elapsed_s"])
            for k, J, g, s, t in zip(self.iters, self.J, self.grad_inf, self.step, self.elapsed):
                writer.writerow([k, repr(J), repr(g), repr(s), repr(t if timing else 0.0)])


def _finite(x) -> bool:
    return bool(np.all(np.isfinite(x)))


def gradient_descent(init, objective, config: DescentConfig | None = None, callback=None):
    """Minimise ``objective`` from ``init``; returns ``(v_final, trace)``.

    ``trace.status`` is ``"converged"``, ``"max_iters"`` or ``"diverged"``.
    On divergence ``v_final`` is the last finite iterate.
    """
    cfg = config if config is not None else DescentConfig()
    v = np.array(init, dtype=np.float64, copy=True)
    trace = DescentTrace()
    t0 = time.perf_counter()

    try:
        J, g = objective.value_and_gradient(v)
    except FloatingPointError as exc:
        trace.status, trace.message = "diverged", str(exc)
        return v, trace
    if not (math.isfinite(J) and _finite(g)):
        trace.status, trace.message = "diverged", "non-finite objective at the initial point"
        return v, trace

    grad_tol = cfg.grad_tol if cfg.grad_tol is not None else 1e-6 * (1.0 + J)
    ginf = float(np.max(np.abs(g))) if g.size else 0.0
    trace.record(0, J, ginf, 0.0, 0.0, 0.0)
    trace.snapshot(0, v, cfg.max_snapshots)
    step = cfg.kappa
    rises = 0

    if ginf <= grad_tol:
        trace.status = "converged"
        return v, trace

    for k in range(1, cfg.max_iters + 1):
        gg = float(g @ g)
        if cfg.mode == "fixed":
            t = cfg.kappa
            v_new = v - t * g
            try:
                J_new = objective.value(v_new)
            except FloatingPointError:
                J_new = math.inf
        else:
            t = step
            for _ in range(cfg.max_backtracks + 1):
                v_new = v - t * g
                try:
                    J_new = objective.value(v_new)
                except FloatingPointError:
                    J_new = math.inf
                if math.isfinite(J_new) and J_new <= J - cfg.c1 * t * gg:
                    break
                t *= cfg.backtrack
            else:
                trace.status = "converged"
                trace.message = "line search made no progress"
                break

        if not math.isfinite(J_new):
            trace.status = "diverged"
            trace.message = f"non-finite objective at iteration {k}"
            break

        try:
            J_new, g_new = objective.value_and_gradient(v_new)
        except FloatingPointError as exc:
            trace.status, trace.message = "diverged", str(exc)
            break
        if not _finite(g_new):
            trace.status = "diverged"
            trace.message = f"non-finite gradient at iteration {k}"
            break

        move = t * math.sqrt(gg)
        J_prev = J
        v, J, g = v_new, J_new, g_new
        ginf = float(np.max(np.abs(g))) if g.size else 0.0
        trace.record(k, J, ginf, t, move, time.perf_counter() - t0)
        trace.snapshot(k, v, cfg.max_snapshots)
        if callback is not None:
            callback(k, v, J)
        if cfg.log_every and k % cfg.log_every == 0:
            log.info("iter %d  J=%.6e  |g|_inf=%.3e  step=%.3e", k, J, ginf, t)

        if cfg.mode == "fixed":
            rises = rises + 1 if J > J_prev else 0
            if rises >= 3:
                trace.status = "diverged"
                trace.message = (f"J increased for 3 consecutive iterations with kappa={cfg.kappa:g}; "
                                 "reduce kappa or use the armijo line search")
                break
        else:
            step = t * cfg.growth

        if ginf <= grad_tol:
            trace.status = "converged"
            break
        if abs(J_prev - J) <= cfg.J_rel_tol * abs(J_prev):
            trace.status = "converged"
            trace.message = "relative decrease below tolerance"
            break
    else:
        trace.status = "max_iters"

    if trace.snapshots[-1][0] != trace.n_iters:
        trace.snapshot(trace.n_iters, v, cfg.max_snapshots, force=True)
    return v, trace


def contraction_from_distances(ks, dists, floor: float = 0.0):
    """Fit ``dist_k ~ C theta^(k/2)`` by least squares on ``log dist``.

    Points with ``dist <= floor`` are dropped; returns ``None`` when fewer
    than two usable points remain.
    """
    ks = np.asarray(ks, dtype=np.float64)
    d = np.asarray(dists, dtype=np.float64)
    keep = d > floor
    if keep.sum() < 2:
        return None
    slope = np.polyfit(ks[keep], np.log(d[keep]), 1)[0]
    return float(min(math.exp(2.0 * slope), 1.0))


def estimate_contraction(trace: DescentTrace, limit=None):
    """Empirical contraction factor from distances to the final iterate.

    Uses snapshots in the second half of the run. ``limit`` replaces the
    final iterate as the reference point when the true minimiser is known.
    Snapshots within ten final step lengths of the reference are dropped,
    since their distance is dominated by the reference's own error.
    """
    if trace.n_iters < 10 or len(trace.snapshots) < 3:
        return None
    k_final, v_final = trace.snapshots[-1]
    ref = v_final if limit is None else np.asarray(limit, dtype=np.float64)
    half = k_final / 2.0
    pts = [(k, float(np.linalg.norm(v - ref))) for k, v in trace.snapshots if half <= k < k_final]
    if limit is None:
        noise = 10.0 * trace.move[-1] if trace.move else 0.0
    else:
        noise = 0.0
    scale = max(float(np.linalg.norm(ref)), 1.0)
    floor = max(noise, 1e-13 * scale)
    if not pts:
        return None
    ks, ds = zip(*pts)
    return contraction_from_distances(ks, ds, floor=floor)


def bisect_fixed_step(objective, init, lo: float, hi: float, probe_iters: int = 50, rounds: int = 20) -> float:
    """Largest ``kappa`` in ``[lo, hi]`` (to bisection accuracy, geometric
    midpoints) for which a fixed-step run of up to ``probe_iters`` iterations
    from ``init`` never increases ``J``."""

    def ok(kappa):
        cfg = DescentConfig(mode="fixed", kappa=kappa, max_iters=probe_iters, max_snapshots=4)
        _, trace = gradient_descent(init, objective, cfg)
        if trace.status == "diverged":
            return False
        return all(b <= a for a, b in zip(trace.J, trace.J[1:]))

    if not ok(lo):
        raise ValueError(f"lower bound kappa={lo:g} already fails the descent probe")
    if ok(hi):
        return hi
    for _ in range(rounds):
        mid = math.sqrt(lo * hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo
