"""Discrete Carleman-weighted least-squares functional and its gradient.

For a field ``u`` on the grid

    J(u) = h^2 sum_int w(z_j) |-eps0 lap_h u + F(x, u, dx_h u, dz_h u)|^2
         + eta h^2 ( sum_all u^2 + sum_int |dx_h u|^2 + |dz_h u|^2 + |lap_h u|^2 )

where ``sum_int`` runs over nodes ``1 <= i, j <= N-2`` (0-based). The
unknowns are the free interior values; boundary values come from the
Dirichlet data and, when Neumann data is used, the row next to the top
edge is eliminated through

    u[i, N-2] = u[i, N-1] - h g(x_i).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hjconvex import kernels
from hjconvex.carleman import CarlemanParams, weight
from hjconvex.grid import ConfigurationError, Grid, NodeClass
from hjconvex.hamiltonian import Problem


class ObjectiveError(FloatingPointError):
    """Non-finite objective or gradient; ``node`` is the first offending ``(i, j)``."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


@dataclass(frozen=True)
class ObjectiveConfig:
    eps0: float = 1e-3
    eta: float = 1e-4
    carleman: CarlemanParams = field(default_factory=CarlemanParams.paper_defaults)
    reg_order: int = 2

    def __post_init__(self):
        if self.eps0 < 0:
            raise ConfigurationError(f"eps0 must be >= 0, got {self.eps0}")
        if self.eta < 0:
            raise ConfigurationError(f"eta must be >= 0, got {self.eta}")
        if self.reg_order != 2:
            raise ConfigurationError("only the order-2 regularizer is implemented")


class DofMap:
    """Free degrees of freedom and the affine map back to full fields."""

    def __init__(self, grid: Grid, neumann: bool):
        self.grid = grid
        self.neumann = bool(neumann)
        self.classes = grid.node_classes(neumann=self.neumann)
        self.free_mask = self.classes == NodeClass.INTERIOR
        self.size = int(self.free_mask.sum())

    def embed(self, free, boundary: np.ndarray, neumann_data=None) -> np.ndarray:
        """Full field from free values, Dirichlet samples and top-edge ``u_z``.

        ``boundary`` is a full ``(N, N)`` array of which only boundary nodes
        are read; ``neumann_data`` holds ``g(x_i)`` for every column.
        """
        free = np.asarray(free, dtype=np.float64)
        if free.shape != (self.size,):
            raise ValueError(f"free vector has shape {free.shape}, expected ({self.size},)")
        u = np.array(boundary, dtype=np.float64, copy=True)
        u[self.free_mask] = free
        if self.neumann:
            if neumann_data is None:
                raise ValueError("Neumann data required for this DOF map")
            u[1:-1, -2] = u[1:-1, -1] - self.grid.h * np.asarray(neumann_data)[1:-1]
        return u

    def embed_homogeneous(self, free) -> np.ndarray:
        """Embed with zero boundary and zero Neumann data (for differences)."""
        zeros = np.zeros(self.grid.shape)
        return self.embed(free, zeros, np.zeros(self.grid.N))

    def restrict(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(u, dtype=np.float64)[self.free_mask]


class Objective:
    """``J`` and its gradient for one problem, grid and set of boundary data.

    ``boundary`` defaults to the problem's Dirichlet function sampled on the
    grid and ``neumann_data`` to its Neumann function on the top edge; pass
    noisy samples to solve with perturbed data. ``use_neumann`` defaults to
    whether the problem carries Neumann data.
    """

    def __init__(self, problem: Problem, grid: Grid, config: ObjectiveConfig | None = None,
                 boundary: np.ndarray | None = None, neumann_data=None,
                 use_neumann: bool | None = None):
        self.problem = problem
        self.grid = grid
        self.config = config if config is not None else ObjectiveConfig(
            carleman=CarlemanParams.paper_defaults(grid.R))
        if use_neumann is None:
            use_neumann = problem.has_neumann
        if use_neumann and neumann_data is None and not problem.has_neumann:
            raise ConfigurationError(f"problem {problem.name!r} has no Neumann data")
        self.dofmap = DofMap(grid, use_neumann)
        if boundary is None:
            boundary = grid.sample(problem.dirichlet)
        self.boundary = np.where(grid.boundary_mask(), boundary, 0.0)
        if use_neumann and neumann_data is None:
            neumann_data = np.broadcast_to(problem.neumann(grid.x, grid.R), (grid.N,)).astype(float)
        self.neumann_data = None if not use_neumann else np.asarray(neumann_data, dtype=np.float64)

        self._X, self._Z = grid.interior_mesh()
        self._w = weight(self._Z, self.config.carleman)
        self._h2 = grid.h * grid.h

    @property
    def size(self) -> int:
        return self.dofmap.size

    def embed(self, free) -> np.ndarray:
        return self.dofmap.embed(free, self.boundary, self.neumann_data)

    def restrict(self, u) -> np.ndarray:
        return self.dofmap.restrict(u)

    def initial_guess(self) -> np.ndarray:
        return np.zeros(self.size)

    def _parts(self, free):
        u = self.embed(free)
        lap, dx, dz = kernels.stencils(u, self.grid.h)
        s = u[1:-1, 1:-1]
        res = -self.config.eps0 * lap + self.problem.hamiltonian.value(self._X, self._Z, s, dx, dz)
        return u, lap, dx, dz, res

    def residual(self, free) -> np.ndarray:
        """Residual on the full grid (zero on the boundary)."""
        out = np.zeros(self.grid.shape)
        out[1:-1, 1:-1] = self._parts(free)[4]
        return out

    def _check(self, arr, what, offset=1):
        if not np.all(np.isfinite(arr)):
            idx = np.argwhere(~np.isfinite(arr))[0]
            node = tuple(int(k) + offset for k in idx)
            raise ObjectiveError(f"non-finite {what} at node {node}", node=node)

    def _value_from_parts(self, u, lap, dx, dz, res):
        eta = self.config.eta
        data = self._h2 * float(np.sum(self._w * res * res))
        if eta == 0.0:
            return data
        reg = float(np.sum(u * u)) + float(np.sum(dx * dx + dz * dz + lap * lap))
        return data + eta * self._h2 * reg

    def value(self, free) -> float:
        u, lap, dx, dz, res = self._parts(free)
        self._check(res, "residual")
        return self._value_from_parts(u, lap, dx, dz, res)

    def value_and_gradient(self, free):
        u, lap, dx, dz, res = self._parts(free)
        self._check(res, "residual")
        J = self._value_from_parts(u, lap, dx, dz, res)

        eps0, eta, h2 = self.config.eps0, self.config.eta, self._h2
        ds, dp1, dp2 = self.problem.hamiltonian.derivatives(self._X, self._Z, u[1:-1, 1:-1], dx, dz)
        a = 2.0 * h2 * self._w * res
        reg = 2.0 * eta * h2
        full = kernels.stencils_adjoint(
            np.ascontiguousarray(-eps0 * a + reg * lap),
            np.ascontiguousarray(a * dp1 + reg * dx),
            np.ascontiguousarray(a * dp2 + reg * dz),
            np.ascontiguousarray(a * ds),
            self.grid.h,
        )
        if eta:
            full += reg * u
        self._check(full, "gradient", offset=0)
        # eliminated Neumann-row values depend only on data: their share is dropped
        return J, full[self.dofmap.free_mask]

    def gradient(self, free) -> np.ndarray:
        return self.value_and_gradient(free)[1]

    def regularizer_form(self, w_free) -> float:
        """Discrete regularizer quadratic form of a homogeneous increment."""
        w = self.dofmap.embed_homogeneous(w_free)
        lap, dx, dz = kernels.stencils(w, self.grid.h)
        return self._h2 * (float(np.sum(w * w)) + float(np.sum(dx * dx + dz * dz + lap * lap)))

    def convexity_margin(self, u_free, v_free) -> float:
        """``J(v) - J(u) - <grad J(u), v - u> - eta Q(v - u)``."""
        u_free = np.asarray(u_free, dtype=np.float64)
        v_free = np.asarray(v_free, dtype=np.float64)
        Ju, gu = self.value_and_gradient(u_free)
        Jv = self.value(v_free)
        w = v_free - u_free
        return Jv - Ju - float(gu @ w) - self.config.eta * self.regularizer_form(w)


def eval_J(objective: Objective, free) -> float:
    return objective.value(free)


def eval_grad_J(objective: Objective, free) -> np.ndarray:
    return objective.gradient(free)


def convexity_probe(objective: Objective, u_free, v_free) -> float:
    return objective.convexity_margin(u_free, v_free)
