"""Hamiltonians ``F(x, s, p)``, their generalized derivatives, and the
built-in benchmark problems.

All Hamiltonian methods are vectorised over numpy arrays and take the
point as two coordinates ``x, z`` and the gradient as ``p1, p2``.

Nonsmooth pieces use a fixed subgradient selection so the objective
gradient is deterministic:

* ``d|q|/dq`` at ``q = 0`` is 0, and the gradient of ``|p|`` at ``p = 0``
  is the zero vector;
* ``min(a, b)`` differentiates through ``a`` on ties;
* a Hamiltonian that is discontinuous across a line ``x = c`` uses the
  ``x < c`` branch on the line itself.

With ``smoothing_mu > 0`` every ``|q|`` or ``|p|`` that depends on the
gradient argument is replaced by ``sqrt(q^2 + mu^2)`` before differentiating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from hjconvex.grid import ConfigurationError, Grid
from hjconvex import kernels

PI = math.pi


def smooth_abs(q, mu=0.0):
    q = np.asarray(q, dtype=np.float64)
    if mu > 0.0:
        return np.sqrt(q * q + mu * mu)
    return np.abs(q)


def smooth_abs_deriv(q, mu=0.0):
    q = np.asarray(q, dtype=np.float64)
    if mu > 0.0:
        return q / np.sqrt(q * q + mu * mu)
    return np.sign(q)


def smooth_norm(p1, p2, mu=0.0):
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    return np.sqrt(p1 * p1 + p2 * p2 + mu * mu)


def smooth_norm_grad(p1, p2, mu=0.0):
    """Gradient of ``smooth_norm`` in ``p``; zero vector at ``p = 0`` when ``mu = 0``."""
    nrm = smooth_norm(p1, p2, mu)
    positive = nrm > 0.0
    inv = np.divide(1.0, nrm, out=np.zeros_like(nrm), where=positive)
    return p1 * inv, p2 * inv


class Hamiltonian:
    """Base class for ``F(x, s, p)``.

    Subclasses implement :meth:`value`, :meth:`d_s` and :meth:`d_p`.
    """

    smoothing_mu: float = 0.0

    def value(self, x, z, s, p1, p2):
        raise NotImplementedError

    def d_s(self, x, z, s, p1, p2):
        raise NotImplementedError

    def d_p(self, x, z, s, p1, p2):
        raise NotImplementedError

    def derivatives(self, x, z, s, p1, p2):
        """Return ``(d_s, d_p1, d_p2)`` broadcast to a common shape."""
        ds = self.d_s(x, z, s, p1, p2)
        dp1, dp2 = self.d_p(x, z, s, p1, p2)
        return np.broadcast_arrays(ds, dp1, dp2)

    def __call__(self, x, z, s, p1, p2):
        return self.value(x, z, s, p1, p2)


class CallableHamiltonian(Hamiltonian):
    """Wrap user-supplied callables as a :class:`Hamiltonian`.

    ``d_p`` must return a pair ``(d_p1, d_p2)``.
    """

    def __init__(self, value, d_s, d_p, smoothing_mu=0.0):
        self._value = value
        self._d_s = d_s
        self._d_p = d_p
        self.smoothing_mu = float(smoothing_mu)

    def value(self, x, z, s, p1, p2):
        return self._value(x, z, s, p1, p2)

    def d_s(self, x, z, s, p1, p2):
        return self._d_s(x, z, s, p1, p2)

    def d_p(self, x, z, s, p1, p2):
        return self._d_p(x, z, s, p1, p2)


class RadialSource(Hamiltonian):
    """``s/150 + |p| + (x^2 + z^2)/150 - 2 sqrt(x^2 + z^2)``."""

    def __init__(self, smoothing_mu=0.0):
        self.smoothing_mu = float(smoothing_mu)

    def value(self, x, z, s, p1, p2):
        r2 = x * x + z * z
        return s / 150.0 + smooth_norm(p1, p2, self.smoothing_mu) + r2 / 150.0 - 2.0 * np.sqrt(r2)

    def d_s(self, x, z, s, p1, p2):
        return np.full(np.broadcast(x, z, s, p1, p2).shape, 1.0 / 150.0)

    def d_p(self, x, z, s, p1, p2):
        return smooth_norm_grad(p1, p2, self.smoothing_mu)


class ConstantSpeedEikonal(Hamiltonian):
    """``|p| - sqrt(2)``."""

    def __init__(self, smoothing_mu=0.0):
        self.smoothing_mu = float(smoothing_mu)

    def value(self, x, z, s, p1, p2):
        return smooth_norm(p1, p2, self.smoothing_mu) - math.sqrt(2.0)

    def d_s(self, x, z, s, p1, p2):
        return np.zeros(np.broadcast(x, z, s, p1, p2).shape)

    def d_p(self, x, z, s, p1, p2):
        return smooth_norm_grad(p1, p2, self.smoothing_mu)


def _test3_parts(x, z):
    rho = PI * (x * x + z * z)
    ex = np.exp(np.sin(rho))
    gx = 2.0 * PI * x * np.cos(rho) * ex
    gz = 2.0 * PI * z * np.cos(rho) * ex
    return ex, gx, gz


class SaddleDiscontinuous(Hamiltonian):
    """``20 s + |p1| - |p2| - (20 u* + G - |u*_z|)``, discontinuous at ``x = 0.5``.

    ``u* = -|x - 0.5| + exp(sin(pi (x^2 + z^2)))`` and ``G`` is ``|u*_x|``
    taken on the branch of ``x`` (left branch on the line).
    """

    threshold = 0.5

    def __init__(self, smoothing_mu=0.0):
        self.smoothing_mu = float(smoothing_mu)

    def source(self, x, z):
        ex, gx, gz = _test3_parts(x, z)
        left = x <= self.threshold
        G = np.where(left, np.abs(1.0 + gx), np.abs(-1.0 + gx))
        return 20.0 * (-np.abs(x - 0.5) + ex) + G - np.abs(gz)

    def value(self, x, z, s, p1, p2):
        mu = self.smoothing_mu
        return 20.0 * s + smooth_abs(p1, mu) - smooth_abs(p2, mu) - self.source(x, z)

    def d_s(self, x, z, s, p1, p2):
        return np.full(np.broadcast(x, z, s, p1, p2).shape, 20.0)

    def d_p(self, x, z, s, p1, p2):
        mu = self.smoothing_mu
        return smooth_abs_deriv(p1, mu), -smooth_abs_deriv(p2, mu)


class GEquation(Hamiltonian):
    """``s + |p| - x p1``."""

    def __init__(self, smoothing_mu=0.0):
        self.smoothing_mu = float(smoothing_mu)

    def value(self, x, z, s, p1, p2):
        return s + smooth_norm(p1, p2, self.smoothing_mu) - x * p1

    def d_s(self, x, z, s, p1, p2):
        return np.ones(np.broadcast(x, z, s, p1, p2).shape)

    def d_p(self, x, z, s, p1, p2):
        n1, n2 = smooth_norm_grad(p1, p2, self.smoothing_mu)
        return n1 - x, n2


def capped_speed(t, mu=0.0):
    """``min(t, |t - 10| + 6)``; the inner absolute value is smoothed by ``mu``."""
    return np.minimum(t, smooth_abs(t - 10.0, mu) + 6.0)


def capped_speed_deriv(t, mu=0.0):
    """Derivative of :func:`capped_speed`; first branch on ties."""
    first = t <= smooth_abs(t - 10.0, mu) + 6.0
    return np.where(first, 1.0, smooth_abs_deriv(t - 10.0, mu))


class CappedSpeed(Hamiltonian):
    """``15 s + m(|p|) - [15 u* + m(|grad u*|)]`` with ``m(t) = min(t, |t-10| + 6)``.

    ``u* = -|x| + sin(2 pi (x + z))``; the source uses the one-sided
    gradient of ``u*`` on the branch of ``x``, left branch at ``x = 0``.
    """

    threshold = 0.0

    def __init__(self, smoothing_mu=0.0):
        self.smoothing_mu = float(smoothing_mu)

    def source(self, x, z):
        c = 2.0 * PI * np.cos(2.0 * PI * (x + z))
        G = np.where(x <= self.threshold, 1.0 + c, -1.0 + c)
        slope = np.sqrt(G * G + c * c)
        return 15.0 * (-np.abs(x) + np.sin(2.0 * PI * (x + z))) + capped_speed(slope)

    def value(self, x, z, s, p1, p2):
        mu = self.smoothing_mu
        return 15.0 * s + capped_speed(smooth_norm(p1, p2, mu), mu) - self.source(x, z)

    def d_s(self, x, z, s, p1, p2):
        return np.full(np.broadcast(x, z, s, p1, p2).shape, 15.0)

    def d_p(self, x, z, s, p1, p2):
        mu = self.smoothing_mu
        t = smooth_norm(p1, p2, mu)
        n1, n2 = smooth_norm_grad(p1, p2, mu)
        dm = capped_speed_deriv(t, mu)
        return dm * n1, dm * n2


class VariableSpeedEikonal(Hamiltonian):
    """``c(x)^2 |p|^2 - 1`` for a positive speed ``c(x, z)``."""

    def __init__(self, speed: Callable | None = None):
        self.speed = speed if speed is not None else (lambda x, z: np.ones(np.broadcast(x, z).shape))

    def value(self, x, z, s, p1, p2):
        c = self.speed(x, z)
        return c * c * (p1 * p1 + p2 * p2) - 1.0

    def d_s(self, x, z, s, p1, p2):
        return np.zeros(np.broadcast(x, z, s, p1, p2).shape)

    def d_p(self, x, z, s, p1, p2):
        c2 = self.speed(x, z) ** 2
        return 2.0 * c2 * p1, 2.0 * c2 * p2


@dataclass
class Problem:
    """Boundary-value problem ``F(x, u, grad u) = 0`` with boundary data.

    ``dirichlet(x, z)`` gives ``u`` on the boundary, ``neumann(x, z)`` gives
    ``u_z`` on the top edge ``z = R`` (``None`` when not available).
    ``true_solution``/``true_gradient`` are only set for benchmarks.
    """

    id: int | None
    name: str
    hamiltonian: Hamiltonian
    dirichlet: Callable
    neumann: Callable | None = None
    true_solution: Callable | None = None
    true_gradient: Callable | None = None

    @property
    def has_neumann(self) -> bool:
        return self.neumann is not None


def _u1(x, z):
    return -(x * x + z * z)


def _u2(x, z):
    return -(np.abs(x) + np.abs(z))


def _u3(x, z):
    return -np.abs(x - 0.5) + np.exp(np.sin(PI * (x * x + z * z)))


def _u4(x, z):
    return -np.abs(x) - 1.0 + 0.0 * z


def _u5(x, z):
    return -np.abs(x) + np.sin(2.0 * PI * (x + z))


def _grad3(x, z):
    _, gx, gz = _test3_parts(x, z)
    return -np.sign(x - 0.5) + gx, gz


def _grad5(x, z):
    c = 2.0 * PI * np.cos(2.0 * PI * (x + z))
    return -np.sign(x) + c, c


def _problem(pid: int, smoothing_mu: float = 0.0, speed: Callable | None = None) -> Problem:
    mu = smoothing_mu
    if pid == 1:
        return Problem(1, "radial", RadialSource(mu), _u1,
                       neumann=lambda x, z: -2.0 * z + 0.0 * x,
                       true_solution=_u1,
                       true_gradient=lambda x, z: (-2.0 * x, -2.0 * z))
    if pid == 2:
        return Problem(2, "eikonal-l1", ConstantSpeedEikonal(mu), _u2,
                       neumann=lambda x, z: np.where(z < 0, 1.0, -1.0) + 0.0 * x,
                       true_solution=_u2,
                       true_gradient=lambda x, z: (-np.sign(x), -np.sign(z)))
    if pid == 3:
        return Problem(3, "saddle", SaddleDiscontinuous(mu), _u3,
                       neumann=lambda x, z: _test3_parts(x, z)[2],
                       true_solution=_u3, true_gradient=_grad3)
    if pid == 4:
        return Problem(4, "g-equation", GEquation(mu), _u4,
                       true_solution=_u4,
                       true_gradient=lambda x, z: (-np.sign(x), 0.0 * z))
    if pid == 5:
        return Problem(5, "capped-speed", CappedSpeed(mu), _u5,
                       true_solution=_u5, true_gradient=_grad5)
    if pid == 6:
        c = speed if speed is not None else (lambda x, z: np.ones(np.broadcast(x, z).shape))
        return Problem(6, "eikonal", VariableSpeedEikonal(c),
                       lambda x, z: np.zeros(np.broadcast(x, z).shape),
                       neumann=lambda x, z: -1.0 / c(x, z))
    raise ConfigurationError(f"unknown problem id {pid!r}; expected 1..6")


PROBLEM_NAMES = {
    "radial": 1,
    "eikonal-l1": 2,
    "saddle": 3,
    "g-equation": 4,
    "capped-speed": 5,
    "eikonal": 6,
}


def builtin_problem(key, smoothing_mu: float = 0.0, speed: Callable | None = None) -> Problem:
    """Built-in problem by id (1..6) or name (see ``PROBLEM_NAMES``).

    ``speed`` only applies to the eikonal problem (id 6).
    """
    if isinstance(key, str):
        if key.isdigit():
            key = int(key)
        elif key in PROBLEM_NAMES:
            key = PROBLEM_NAMES[key]
        else:
            raise ConfigurationError(
                f"unknown problem {key!r}; choose an id 1..6 or one of {sorted(PROBLEM_NAMES)}"
            )
    return _problem(int(key), smoothing_mu=smoothing_mu, speed=speed)


def generalized_derivatives(problem: Problem, point, s, p):
    """``(d_s, (d_p1, d_p2))`` of the problem's Hamiltonian at ``(point, s, p)``."""
    x, z = point
    p1, p2 = p
    H = problem.hamiltonian
    return H.d_s(x, z, s, p1, p2), tuple(H.d_p(x, z, s, p1, p2))


def residual_field(problem: Problem, u: np.ndarray, grid: Grid, eps0: float) -> np.ndarray:
    """``-eps0 lap_h u + F(x, u, grad_h u)`` at interior nodes, 0 on the boundary."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    lap, dx, dz = kernels.stencils(u, grid.h)
    X, Z = grid.interior_mesh()
    out = np.zeros(grid.shape)
    out[1:-1, 1:-1] = -eps0 * lap + problem.hamiltonian.value(X, Z, u[1:-1, 1:-1], dx, dz)
    return out
