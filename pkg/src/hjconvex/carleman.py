"""Carleman weight ``exp(2 lambda |(z + r)/b|^beta)`` and a numerical probe
of the weighted Laplacian lower bound it satisfies.

For ``u`` vanishing on the boundary with ``u_z = 0`` on the top edge the
probe compares

    lhs   = sum w |lap u|^2 h^2
    rhs   = lambda^3 beta^2 (beta-1) b^(-3 beta) (r-R)^(2 beta) sum w u^2 h^2
            + lambda (beta-1) b^(-beta) sum w |grad u|^2 h^2

over interior nodes and reports ``ratio = lhs / rhs``. The inequality
``lhs >= C rhs`` holds for large ``lambda`` with an unknown constant ``C``;
the ratio is the empirical value of that constant for the given ``u``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from hjconvex import kernels
from hjconvex.grid import ConfigurationError, Grid

log = logging.getLogger(__name__)

# exp overflows just above 709.78
_MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class CarlemanParams:
    """Weight parameters.

    The theorem behind the weight assumes ``beta > 1``, ``r > R + 1`` and
    ``b > R + r``. The published experiments use ``r = 1.2`` with ``R = 1``,
    which breaks ``r > R + 1``; pass ``permissive=True`` to allow that (a
    warning is logged). ``beta > 1`` and ``r > R`` are always enforced so the
    weight stays increasing in ``z``.
    """

    lam: float = 2.0
    beta: float = 8.0
    r: float = 1.2
    b: float = 10.0
    R: float = 1.0
    permissive: bool = False

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigurationError(f"lambda must be >= 0, got {self.lam}")
        if not self.beta > 1:
            raise ConfigurationError(f"beta must exceed 1, got {self.beta}")
        if not self.r > self.R:
            raise ConfigurationError(f"r must exceed R={self.R}, got {self.r}")
        problems = []
        if not self.r > self.R + 1:
            problems.append(f"r={self.r} <= R+1={self.R + 1}")
        if not self.b > self.R + self.r:
            problems.append(f"b={self.b} <= R+r={self.R + self.r}")
        if problems:
            msg = "Carleman hypotheses violated: " + ", ".join(problems)
            if not self.permissive:
                raise ConfigurationError(msg + " (use permissive=True to proceed)")
            log.warning("%s; continuing in permissive mode", msg)

    @property
    def theorem_compliant(self) -> bool:
        return self.r > self.R + 1 and self.b > self.R + self.r

    @classmethod
    def paper_defaults(cls, R: float = 1.0) -> "CarlemanParams":
        """Parameters used for the benchmark runs (``r = 1.2`` is permissive)."""
        return cls(lam=2.0, beta=8.0, r=1.2, b=10.0, R=R, permissive=True)

    def with_lambda(self, lam: float) -> "CarlemanParams":
        return CarlemanParams(lam, self.beta, self.r, self.b, self.R, self.permissive)


def weight(z, params: CarlemanParams):
    exponent = 2.0 * params.lam * np.abs((np.asarray(z, dtype=np.float64) + params.r) / params.b) ** params.beta
    if np.any(exponent > _MAX_EXPONENT):
        raise OverflowError(
            f"Carleman weight exponent {float(np.max(exponent)):.3g} overflows float64; reduce lambda"
        )
    return np.exp(exponent)


def weight_field(grid: Grid, params: CarlemanParams) -> np.ndarray:
    _, Z = grid.mesh()
    return weight(Z, params)


def admissible_function(q=None, R: float = 1.0):
    """``(R^2 - x^2)(z + R)(R - z)^2 q(x, z)``.

    Vanishes on the boundary of the square and has zero z-derivative on the
    top edge for any smooth ``q`` (default ``q = 1``).
    """

    def u(x, z):
        base = (R * R - x * x) * (z + R) * (R - z) ** 2
        return base if q is None else base * q(x, z)

    return u


def random_smooth_factor(rng: np.random.Generator):
    """Random smooth, strictly positive ``q(x, z)`` for the admissible family."""
    a = rng.uniform(-0.5, 0.5, size=3)
    k = rng.uniform(0.5, 3.0, size=2)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    amp = rng.uniform(0.0, 0.4)

    def q(x, z):
        return 1.0 + a[0] * x + a[1] * z + a[2] * x * z + amp * np.sin(k[0] * x + k[1] * z + phase)

    return q


@dataclass
class CarlemanRecord:
    lam: float
    lhs: float
    rhs_u: float
    rhs_grad: float
    rhs: float
    ratio: float | None


@dataclass
class CarlemanReport:
    params: CarlemanParams
    N: int
    records: list[CarlemanRecord] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return all(rec.ratio is None for rec in self.records)

    def ratios(self) -> np.ndarray:
        return np.array([np.nan if rec.ratio is None else rec.ratio for rec in self.records])


def _check_admissible(u, fn, grid: Grid, tol: float):
    boundary = grid.boundary_mask()
    worst = float(np.max(np.abs(u[boundary]))) if boundary.any() else 0.0
    if worst > tol:
        raise ValueError(f"test function is not zero on the boundary (max |u| = {worst:.3e})")
    if fn is not None:
        # central difference straddling z = R; error O(d^2) for admissible u
        d = 1e-6
        x = grid.x
        uz = (fn(x, grid.R + d) - fn(x, grid.R - d)) / (2.0 * d)
        worst = float(np.max(np.abs(uz)))
        if worst > tol:
            raise ValueError(f"test function has nonzero u_z on the top edge (max = {worst:.3e})")


def verify_carleman(u_test, params: CarlemanParams, lambdas, grid: Grid, tol: float = 1e-10) -> CarlemanReport:
    """Evaluate both sides of the weighted estimate for each ``lambda``.

    ``u_test`` is either a vectorised callable ``u(x, z)`` or a sampled
    ``(N, N)`` field. Callables are checked for both boundary conditions;
    sampled fields only for the Dirichlet one.
    """
    fn = u_test if callable(u_test) else None
    u = grid.sample(fn) if fn is not None else np.asarray(u_test, dtype=np.float64)
    if u.shape != grid.shape:
        raise ValueError(f"field shape {u.shape} does not match grid {grid.shape}")
    _check_admissible(u, fn, grid, tol)

    lap, dx, dz = kernels.stencils(np.ascontiguousarray(u), grid.h)
    _, Z = grid.interior_mesh()
    ui = u[1:-1, 1:-1]
    h2 = grid.h * grid.h
    beta, b, r, R = params.beta, params.b, params.r, grid.R
    report = CarlemanReport(params=params, N=grid.N)
    for lam in lambdas:
        w = weight(Z, params.with_lambda(float(lam)))
        lhs = h2 * float(np.sum(w * lap * lap))
        rhs_u = h2 * float(np.sum(w * ui * ui))
        rhs_grad = h2 * float(np.sum(w * (dx * dx + dz * dz)))
        rhs = (lam**3 * beta**2 * (beta - 1) * b ** (-3 * beta) * (r - R) ** (2 * beta) * rhs_u
               + lam * (beta - 1) * b ** (-beta) * rhs_grad)
        ratio = lhs / rhs if rhs > 0 else None
        report.records.append(CarlemanRecord(float(lam), lhs, rhs_u, rhs_grad, rhs, ratio))
    return report
