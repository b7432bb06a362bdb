"""Uniform Cartesian grid on [-R, R]^2 and its finite-difference stencils.

Fields are dense ``(N, N)`` float64 arrays indexed ``u[i, j]``, with ``i``
running along x and ``j`` along z (0-based; node ``(i, j)`` sits at
``(x[i], z[j])``). The top edge ``j = N-1`` is the Neumann edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from hjconvex import kernels


class ConfigurationError(ValueError):
    """Raised for invalid grid, problem or solver parameters."""


class NodeClass(IntEnum):
    INTERIOR = 0
    DIRICHLET = 1
    NEUMANN_ROW = 2


@dataclass(frozen=True)
class Grid:
    R: float
    N: int
    h: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)
    z: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.R > 0:
            raise ConfigurationError(f"half-width R must be positive, got {self.R}")
        if int(self.N) != self.N or self.N < 4:
            raise ConfigurationError(
                f"need at least 4 nodes per axis (two interior rows), got N={self.N}"
            )
        h = 2.0 * self.R / (self.N - 1)
        nodes = -self.R + np.arange(self.N) * h
        nodes[-1] = self.R
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "x", nodes)
        object.__setattr__(self, "z", nodes.copy())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N, self.N)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays ``X, Z`` of shape ``(N, N)``."""
        return np.meshgrid(self.x, self.z, indexing="ij")

    def interior_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        X, Z = self.mesh()
        return X[1:-1, 1:-1], Z[1:-1, 1:-1]

    def sample(self, fn) -> np.ndarray:
        """Evaluate a vectorised ``fn(x, z)`` at every node."""
        X, Z = self.mesh()
        return np.asarray(np.broadcast_to(fn(X, Z), self.shape), dtype=np.float64).copy()

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
        return mask

    def node_classes(self, neumann: bool = True) -> np.ndarray:
        """Per-node :class:`NodeClass` tags.

        With ``neumann=False`` no row is eliminated and every non-boundary
        node is interior.
        """
        tags = np.full(self.shape, NodeClass.INTERIOR, dtype=np.int8)
        if neumann:
            tags[1:-1, -2] = NodeClass.NEUMANN_ROW
        tags[self.boundary_mask()] = NodeClass.DIRICHLET
        return tags


def make_grid(R: float, N: int) -> Grid:
    return Grid(float(R), int(N))


def _pad(interior: np.ndarray) -> np.ndarray:
    out = np.zeros((interior.shape[0] + 2, interior.shape[1] + 2))
    out[1:-1, 1:-1] = interior
    return out


def laplacian_h(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Five-point Laplacian; boundary entries are 0."""
    lap, _, _ = kernels.stencils(np.ascontiguousarray(u, dtype=np.float64), grid.h)
    return _pad(lap)


def dx_h(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Central x-difference; boundary entries are 0."""
    _, dx, _ = kernels.stencils(np.ascontiguousarray(u, dtype=np.float64), grid.h)
    return _pad(dx)


def dz_h(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Central z-difference; boundary entries are 0."""
    _, _, dz = kernels.stencils(np.ascontiguousarray(u, dtype=np.float64), grid.h)
    return _pad(dz)


def linf_rel_error(u: np.ndarray, v: np.ndarray) -> float:
    """``max|u - v| / max|v|`` over all nodes."""
    denom = float(np.max(np.abs(v)))
    if denom == 0.0:
        raise ZeroDivisionError("reference field is identically zero")
    return float(np.max(np.abs(np.asarray(u) - np.asarray(v)))) / denom
