"""Loop-based reference implementations used as independent oracles.

Deliberately written node by node with plain Python floats so they share
no code path with the vectorised kernels.
"""

import math


def lap_at(u, i, j, h):
    return (u[i][j - 1] + u[i][j + 1] + u[i - 1][j] + u[i + 1][j] - 4.0 * u[i][j]) / (h * h)


def dx_at(u, i, j, h):
    return (u[i + 1][j] - u[i - 1][j]) / (2.0 * h)


def dz_at(u, i, j, h):
    return (u[i][j + 1] - u[i][j - 1]) / (2.0 * h)


def weight_at(z, lam, beta, r, b):
    return math.exp(2.0 * lam * abs((z + r) / b) ** beta)


def brute_J(u, xs, h, F, eps0, eta, lam, beta, r, b):
    """``J`` for a full field given as nested lists; ``F(x, z, s, p1, p2)`` is scalar."""
    n = len(xs)
    data = 0.0
    reg = 0.0
    for i in range(n):
        for j in range(n):
            reg += u[i][j] ** 2
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            lap = lap_at(u, i, j, h)
            px = dx_at(u, i, j, h)
            pz = dz_at(u, i, j, h)
            res = -eps0 * lap + F(xs[i], xs[j], u[i][j], px, pz)
            data += weight_at(xs[j], lam, beta, r, b) * res * res
            reg += px * px + pz * pz + lap * lap
    return h * h * data + eta * h * h * reg
