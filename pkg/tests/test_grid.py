import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hjconvex.grid import (
    ConfigurationError,
    NodeClass,
    dx_h,
    dz_h,
    laplacian_h,
    linf_rel_error,
    make_grid,
)


def test_paper_grid_spacing():
    g = make_grid(1, 50)
    assert g.h == pytest.approx(2 / 49, rel=1e-15)
    assert abs(g.h * (g.N - 1) - 2 * g.R) / (2 * g.R) < 1e-14
    assert g.x[0] == -1.0 and g.x[-1] == 1.0
    assert g.z[0] == -1.0 and g.z[-1] == 1.0


def test_small_grid_nodes():
    g = make_grid(2, 5)
    np.testing.assert_array_equal(g.x, [-2, -1, 0, 1, 2])


@pytest.mark.parametrize("R,N", [(1, 2), (1, 3), (0, 10), (-1, 10)])
def test_rejects_bad_grids(R, N):
    with pytest.raises(ConfigurationError):
        make_grid(R, N)


@pytest.mark.parametrize("N", [4, 7, 50])
def test_node_class_counts(N):
    g = make_grid(1, N)
    tags = g.node_classes(neumann=True)
    assert (tags == NodeClass.DIRICHLET).sum() == 4 * (N - 1)
    assert (tags == NodeClass.NEUMANN_ROW).sum() == N - 2
    assert (tags == NodeClass.INTERIOR).sum() == N * N - 4 * (N - 1) - (N - 2)
    # the eliminated row sits just below the top edge
    assert np.all(tags[1:-1, N - 2] == NodeClass.NEUMANN_ROW)
    assert (g.node_classes(neumann=False) == NodeClass.NEUMANN_ROW).sum() == 0


def test_quadratic_exactness_examples():
    g = make_grid(1, 50)
    u = g.sample(lambda x, z: x**2 + z**2)
    lap = laplacian_h(u, g)
    np.testing.assert_allclose(lap[1:-1, 1:-1], 4.0, atol=1e-9)
    assert np.all(lap[0, :] == 0) and np.all(lap[:, -1] == 0)

    const = np.full(g.shape, 3.7)
    np.testing.assert_allclose(laplacian_h(const, g), 0.0, atol=1e-10)

    ux = g.sample(lambda x, z: x + 0 * z)
    np.testing.assert_allclose(dx_h(ux, g)[1:-1, 1:-1], 1.0, atol=1e-12)
    np.testing.assert_allclose(dz_h(ux, g)[1:-1, 1:-1], 0.0, atol=1e-12)

    uz2 = g.sample(lambda x, z: z**2 + 0 * x)
    _, Z = g.interior_mesh()
    np.testing.assert_allclose(dz_h(uz2, g)[1:-1, 1:-1], 2 * Z, atol=1e-12)


def test_laplacian_sine_taylor_bound():
    g = make_grid(1, 50)
    u = g.sample(lambda x, z: np.sin(2 * np.pi * (x + z)))
    exact = -8 * np.pi**2 * u
    dev = np.max(np.abs(laplacian_h(u, g)[1:-1, 1:-1] - exact[1:-1, 1:-1]))
    # u_xxxx = u_zzzz = 16 pi^4 sin(...); each direction contributes h^2/12 of it
    bound = 16 * np.pi**4 * g.h**2 / 12 * 2
    assert dev <= bound
    assert dev > 0.5 * bound  # the bound is attained up to the sine factor


def _exp_sin(x, z):
    return np.exp(np.sin(np.pi * (x**2 + z**2)))


def _exp_sin_dx(x, z):
    return 2 * np.pi * x * np.cos(np.pi * (x**2 + z**2)) * _exp_sin(x, z)


def test_dx_matches_analytic_derivative():
    # at (0.5, 0.5) the analytic value is pi cos(pi/2) e^{sin(pi/2)} = 0
    assert _exp_sin_dx(0.5, 0.5) == pytest.approx(math.pi * math.cos(math.pi * 0.5) * math.e, abs=1e-15)
    g = make_grid(1, 50)
    u = g.sample(_exp_sin)
    i = int(np.argmin(np.abs(g.x - 0.5)))
    err50 = abs(dx_h(u, g)[i, i] - _exp_sin_dx(g.x[i], g.z[i]))
    assert err50 < 0.05
    # on grids containing (0.5, 0.5) the error shrinks like h^2
    errs = []
    for N in (41, 81, 161):
        gg = make_grid(1, N)
        k = int(round((0.5 + 1) / gg.h))
        assert gg.x[k] == pytest.approx(0.5)
        errs.append(abs(dx_h(gg.sample(_exp_sin), gg)[k, k] - _exp_sin_dx(0.5, 0.5)))
    assert 3.0 <= errs[0] / errs[1] <= 5.0
    assert 3.0 <= errs[1] / errs[2] <= 5.0


@pytest.mark.parametrize("op", [laplacian_h, dx_h, dz_h])
def test_second_order_convergence(op):
    def u(x, z):
        return np.sin(1.3 * x) * np.cos(0.7 * z) + x * z**3

    def exact(x, z):
        if op is laplacian_h:
            return -(1.3**2 + 0.7**2) * np.sin(1.3 * x) * np.cos(0.7 * z) + 6 * x * z
        if op is dx_h:
            return 1.3 * np.cos(1.3 * x) * np.cos(0.7 * z) + z**3
        return -0.7 * np.sin(1.3 * x) * np.sin(0.7 * z) + 3 * x * z**2

    errs = []
    for N in (21, 41, 81):
        g = make_grid(1, N)
        X, Z = g.interior_mesh()
        errs.append(np.max(np.abs(op(g.sample(u), g)[1:-1, 1:-1] - exact(X, Z))))
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 <= coarse / fine <= 5.0


coef = st.floats(-5, 5, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.tuples(coef, coef, coef, coef, coef, coef), st.integers(4, 30))
def test_stencils_exact_on_quadratics(c, N):
    a0, a1, a2, a3, a4, a5 = c
    g = make_grid(1, N)
    u = g.sample(lambda x, z: a0 + a1 * x + a2 * z + a3 * x * x + a4 * x * z + a5 * z * z)
    X, Z = g.interior_mesh()
    tol = 1e-9 * (1 + sum(abs(v) for v in c)) * N**2
    np.testing.assert_allclose(laplacian_h(u, g)[1:-1, 1:-1], 2 * a3 + 2 * a5, atol=tol)
    np.testing.assert_allclose(dx_h(u, g)[1:-1, 1:-1], a1 + 2 * a3 * X + a4 * Z, atol=tol)
    np.testing.assert_allclose(dz_h(u, g)[1:-1, 1:-1], a2 + a4 * X + 2 * a5 * Z, atol=tol)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), coef, coef)
def test_stencils_linear(seed, alpha, beta):
    r = np.random.default_rng(seed)
    g = make_grid(1.5, 9)
    u, v = r.standard_normal(g.shape), r.standard_normal(g.shape)
    for op in (laplacian_h, dx_h, dz_h):
        lhs = op(alpha * u + beta * v, g)
        rhs = alpha * op(u, g) + beta * op(v, g)
        np.testing.assert_allclose(lhs, rhs, atol=1e-9 * (1 + abs(alpha) + abs(beta)) / g.h**2)


def test_linf_rel_error():
    v = np.abs(np.random.default_rng(1).standard_normal((6, 6))) + 0.1
    assert linf_rel_error(v, v) == 0.0
    assert linf_rel_error(1.1 * v, v) == pytest.approx(0.1, rel=1e-12)
    with pytest.raises(ZeroDivisionError):
        linf_rel_error(v, np.zeros_like(v))
