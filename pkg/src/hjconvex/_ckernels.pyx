# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stencil kernels.

Same contracts as :mod:`hjconvex._pykernels`; see there for the layout.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def stencils(const double[:, ::1] u, double h):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t m = u.shape[1]
    if n < 3 or m < 3:
        raise ValueError("field must be at least 3x3")
    lap_arr = np.empty((n - 2, m - 2), dtype=np.float64)
    dx_arr = np.empty((n - 2, m - 2), dtype=np.float64)
    dz_arr = np.empty((n - 2, m - 2), dtype=np.float64)
    cdef double[:, ::1] lap = lap_arr
    cdef double[:, ::1] dx = dx_arr
    cdef double[:, ::1] dz = dz_arr
    cdef double inv_h2 = 1.0 / (h * h)
    cdef double inv_2h = 0.5 / h
    cdef Py_ssize_t i, j
    cdef double c, w, e, s, nn
    for i in range(1, n - 1):
        for j in range(1, m - 1):
            c = u[i, j]
            w = u[i - 1, j]
            e = u[i + 1, j]
            s = u[i, j - 1]
            nn = u[i, j + 1]
            lap[i - 1, j - 1] = (s + nn + w + e - 4.0 * c) * inv_h2
            dx[i - 1, j - 1] = (e - w) * inv_2h
            dz[i - 1, j - 1] = (nn - s) * inv_2h
    return lap_arr, dx_arr, dz_arr


def stencils_adjoint(const double[:, ::1] c_lap, const double[:, ::1] c_dx,
                     const double[:, ::1] c_dz, const double[:, ::1] c_id,
                     double h):
    cdef Py_ssize_t n = c_lap.shape[0] + 2
    cdef Py_ssize_t m = c_lap.shape[1] + 2
    out_arr = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double inv_h2 = 1.0 / (h * h)
    cdef double inv_2h = 0.5 / h
    cdef Py_ssize_t i, j
    cdef double a, bx, bz
    # scatter each interior coefficient onto its five stencil neighbours
    for i in range(1, n - 1):
        for j in range(1, m - 1):
            a = c_lap[i - 1, j - 1] * inv_h2
            bx = c_dx[i - 1, j - 1] * inv_2h
            bz = c_dz[i - 1, j - 1] * inv_2h
            out[i, j] += c_id[i - 1, j - 1] - 4.0 * a
            out[i, j - 1] += a - bz
            out[i, j + 1] += a + bz
            out[i - 1, j] += a - bx
            out[i + 1, j] += a + bx
    return out_arr
