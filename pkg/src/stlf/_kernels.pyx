# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. ``_kernels_py`` is the reference implementation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

cdef double TIE_TOL = 1e-10


cdef inline double _logsig(double z) nogil:
    cdef double ez
    if z >= 0:
        return 1.0 / (1.0 + exp(-z))
    ez = exp(z)
    return ez / (1.0 + ez)


def elman_scan(pre, w_context, context0):
    cdef double[:, ::1] P = np.ascontiguousarray(pre, dtype=np.float64)
    cdef double[:, ::1] Wc = np.ascontiguousarray(w_context, dtype=np.float64)
    cdef double[::1] c0 = np.ascontiguousarray(context0, dtype=np.float64)
    cdef Py_ssize_t T = P.shape[0], H = P.shape[1]
    out = np.empty((T, H), dtype=np.float64)
    cdef double[:, ::1] Hs = out
    cdef Py_ssize_t t, j, k
    cdef double z
    with nogil:
        for t in range(T):
            for j in range(H):
                z = P[t, j]
                if t == 0:
                    for k in range(H):
                        z += c0[k] * Wc[k, j]
                else:
                    for k in range(H):
                        z += Hs[t - 1, k] * Wc[k, j]
                Hs[t, j] = _logsig(z)
    return out


def hopfield_recall(weights, state, int max_sweeps):
    cdef double[:, ::1] W = np.ascontiguousarray(weights, dtype=np.float64)
    s_arr = np.array(state, dtype=np.float64)
    cdef double[::1] s = s_arr
    cdef Py_ssize_t n = s.shape[0], i, j
    cdef int sweep
    cdef bint changed
    cdef double h, new
    for sweep in range(1, max_sweeps + 1):
        changed = False
        with nogil:
            for i in range(n):
                h = 0.0
                for j in range(n):
                    h += W[i, j] * s[j]
                if h > TIE_TOL:
                    new = 1.0
                elif h < -TIE_TOL:
                    new = -1.0
                else:
                    continue
                if new != s[i]:
                    s[i] = new
                    changed = True
        if not changed:
            return s_arr, sweep, True
    return s_arr, max_sweeps, False


def mamdani_aggregate(firing, consequent, term_grid):
    cdef double[::1] f = np.ascontiguousarray(firing, dtype=np.float64)
    cdef long[::1] cons = np.ascontiguousarray(consequent, dtype=np.int_)
    cdef double[:, ::1] G = np.ascontiguousarray(term_grid, dtype=np.float64)
    cdef Py_ssize_t R = f.shape[0], npts = G.shape[1], r, g
    out = np.zeros(npts, dtype=np.float64)
    cdef double[::1] agg = out
    cdef double v, w
    with nogil:
        for r in range(R):
            w = f[r]
            if w <= 0.0:
                continue
            for g in range(npts):
                v = G[cons[r], g]
                if w < v:
                    v = w
                if v > agg[g]:
                    agg[g] = v
    return out
