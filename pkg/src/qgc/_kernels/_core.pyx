# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: fixed-step RK4 for the commutator flow and
modified Gram-Schmidt projection against an orthonormal row basis."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline void _flow_rhs(const double complex[:, ::1] H,
                           const double complex[:, ::1] p,
                           double complex[:, ::1] out,
                           Py_ssize_t n) noexcept nogil:
    # out = -i (H p - p H)
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + H[i, k] * p[k, j] - p[i, k] * H[k, j]
            out[i, j] = -1j * acc


def rk4_flow(H, p0, double h, Py_ssize_t nsteps):
    """Integrate dp/dt = -i[H, p] with ``nsteps`` classical RK4 steps of size ``h``.

    Returns an array of shape ``(nsteps + 1, n, n)`` holding the state after
    every step, starting with ``p0``.
    """
    cdef double complex[:, ::1] Hv = np.ascontiguousarray(H, dtype=np.complex128)
    cdef Py_ssize_t n = Hv.shape[0]
    out = np.empty((nsteps + 1, n, n), dtype=np.complex128)
    cdef double complex[:, :, ::1] traj = out
    cdef double complex[:, ::1] p = np.array(p0, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] k1 = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] k2 = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] k3 = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] k4 = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] tmp = np.empty((n, n), dtype=np.complex128)
    cdef Py_ssize_t s, i, j
    cdef double h2 = 0.5 * h, h6 = h / 6.0
    with nogil:
        for i in range(n):
            for j in range(n):
                traj[0, i, j] = p[i, j]
        for s in range(nsteps):
            _flow_rhs(Hv, p, k1, n)
            for i in range(n):
                for j in range(n):
                    tmp[i, j] = p[i, j] + h2 * k1[i, j]
            _flow_rhs(Hv, tmp, k2, n)
            for i in range(n):
                for j in range(n):
                    tmp[i, j] = p[i, j] + h2 * k2[i, j]
            _flow_rhs(Hv, tmp, k3, n)
            for i in range(n):
                for j in range(n):
                    tmp[i, j] = p[i, j] + h * k3[i, j]
            _flow_rhs(Hv, tmp, k4, n)
            for i in range(n):
                for j in range(n):
                    p[i, j] = p[i, j] + h6 * (k1[i, j] + 2.0 * k2[i, j]
                                              + 2.0 * k3[i, j] + k4[i, j])
                    traj[s + 1, i, j] = p[i, j]
    return out


def mgs_residual(const double[:, ::1] Q, Py_ssize_t m, double[::1] x):
    """Remove from ``x`` (in place) its components along the first ``m`` rows of ``Q``.

    Two modified Gram-Schmidt passes. Returns the Euclidean norm of the residual.
    """
    cdef Py_ssize_t d = x.shape[0]
    cdef Py_ssize_t r, i, k
    cdef double c, nrm = 0.0
    with nogil:
        for r in range(2):
            for k in range(m):
                c = 0.0
                for i in range(d):
                    c = c + Q[k, i] * x[i]
                for i in range(d):
                    x[i] = x[i] - c * Q[k, i]
        for i in range(d):
            nrm = nrm + x[i] * x[i]
    return sqrt(nrm)
