# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernel; same contract as ``_kernel_py.advance``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _mod(Py_ssize_t a, Py_ssize_t b) nogil:
    cdef Py_ssize_t r = a % b
    return r + b if r < 0 else r


cdef void _fill(double[::1] s, Py_ssize_t n, const double[:, ::1] ext,
                const long[::1] tl_d, const double[::1] tl_z0, const double[::1] tl_k,
                double[:, :, ::1] wbuf) nogil:
    cdef Py_ssize_t ne = ext.shape[0], m_ext = ext.shape[1]
    cdef Py_ssize_t nt = tl_d.shape[0], lb = wbuf.shape[2]
    cdef Py_ssize_t q = _mod(n, ne), j, r
    for j in range(m_ext):
        s[j] = ext[q, j]
    for j in range(nt):
        r = _mod(n - tl_d[j], lb)
        s[m_ext + 2 * j] = tl_k[j] * wbuf[j, 1, r] / tl_z0[j]
        s[m_ext + 2 * j + 1] = tl_k[j] * wbuf[j, 0, r] / tl_z0[j]


def advance(const double[:, :, ::1] P, const double[:, :, ::1] Ea, const double[:, :, ::1] Eb,
            const double[:, ::1] ext, const long[::1] tl_a, const long[::1] tl_b,
            const double[::1] tl_z0, const double[::1] tl_k, const long[::1] tl_d,
            double[::1] x, double[:, :, ::1] wbuf, Py_ssize_t n0, Py_ssize_t nsteps,
            double[:, ::1] out):
    cdef Py_ssize_t S = P.shape[0], nx = P.shape[1], m = Ea.shape[2]
    cdef Py_ssize_t nt = tl_a.shape[0], lb = wbuf.shape[2]
    cdef Py_ssize_t i, n, k, a, b, j, r, rd
    cdef double acc, w1, w2
    s_now_arr = np.zeros(m)
    s_next_arr = np.zeros(m)
    xn_arr = np.zeros(nx)
    cdef double[::1] s_now = s_now_arr
    cdef double[::1] s_next = s_next_arr
    cdef double[::1] xn = xn_arr
    cdef double[::1] tmp
    with nogil:
        _fill(s_now, n0, ext, tl_d, tl_z0, tl_k, wbuf)
        for i in range(nsteps):
            n = n0 + i
            for a in range(nx):
                out[i, a] = x[a]
            k = _mod(n, S)
            _fill(s_next, n + 1, ext, tl_d, tl_z0, tl_k, wbuf)
            for a in range(nx):
                acc = 0.0
                for b in range(nx):
                    acc = acc + P[k, a, b] * x[b]
                for b in range(m):
                    acc = acc + Ea[k, a, b] * s_now[b] + Eb[k, a, b] * s_next[b]
                xn[a] = acc
            for a in range(nx):
                x[a] = xn[a]
            r = _mod(n + 1, lb)
            for j in range(nt):
                rd = _mod(n + 1 - tl_d[j], lb)
                w1 = 2.0 * x[tl_a[j]] - tl_k[j] * wbuf[j, 1, rd]
                w2 = 2.0 * x[tl_b[j]] - tl_k[j] * wbuf[j, 0, rd]
                wbuf[j, 0, r] = w1
                wbuf[j, 1, r] = w2
            tmp = s_now
            s_now = s_next
            s_next = tmp
    return np.asarray(x)
