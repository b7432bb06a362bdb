"""Pure-numpy stencil kernels.

Both functions work on a full ``(N, M)`` field indexed ``u[i, j]`` with
``i`` along x and ``j`` along z. Interior outputs have shape ``(N-2, M-2)``.
"""

import numpy as np


def stencils(u, h):
    """Return ``(lap, dx, dz)`` at interior nodes of ``u``."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    if u.ndim != 2 or min(u.shape) < 3:
        raise ValueError("field must be at least 3x3")
    c = u[1:-1, 1:-1]
    w = u[:-2, 1:-1]
    e = u[2:, 1:-1]
    s = u[1:-1, :-2]
    n = u[1:-1, 2:]
    lap = (s + n + w + e - 4.0 * c) * (1.0 / (h * h))
    dx = (e - w) * (0.5 / h)
    dz = (n - s) * (0.5 / h)
    return lap, dx, dz


def stencils_adjoint(c_lap, c_dx, c_dz, c_id, h):
    """Transpose of ``stencils`` applied to interior coefficient arrays.

    Returns the full-size field ``L^T c_lap + Dx^T c_dx + Dz^T c_dz + c_id``
    where ``c_id`` is the coefficient of the identity on interior nodes.
    """
    n, m = c_lap.shape[0] + 2, c_lap.shape[1] + 2
    a = np.asarray(c_lap) * (1.0 / (h * h))
    bx = np.asarray(c_dx) * (0.5 / h)
    bz = np.asarray(c_dz) * (0.5 / h)
    out = np.zeros((n, m))
    out[1:-1, 1:-1] += c_id - 4.0 * a
    out[1:-1, :-2] += a - bz
    out[1:-1, 2:] += a + bz
    out[:-2, 1:-1] += a - bx
    out[2:, 1:-1] += a + bx
    return out
