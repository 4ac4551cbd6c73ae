# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same signatures as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, INFINITY

cnp.import_array()

BACKEND = "cython"


def secular_batch(sigmas, lengths, row_ptr, ent_edge, ent_end, ent_qty, ent_sign):
    cdef double[::1] sg = np.ascontiguousarray(sigmas, dtype=np.float64)
    cdef double[::1] ln = np.ascontiguousarray(lengths, dtype=np.float64)
    cdef long[::1] rp = np.ascontiguousarray(row_ptr, dtype=np.int64)
    cdef long[::1] ee = np.ascontiguousarray(ent_edge, dtype=np.int64)
    cdef long[::1] en = np.ascontiguousarray(ent_end, dtype=np.int64)
    cdef long[::1] eq = np.ascontiguousarray(ent_qty, dtype=np.int64)
    cdef double[::1] es = np.ascontiguousarray(ent_sign, dtype=np.float64)
    cdef Py_ssize_t n = sg.shape[0], E = ln.shape[0], R = rp.shape[0] - 1
    out = np.zeros((n, R, 2 * E), dtype=np.float64)
    cdef double[:, :, ::1] M = out
    cdef double[::1] cc = np.empty(E), ss = np.empty(E)
    cdef Py_ssize_t k, r, j, e, col
    cdef double ca, cb, w, nrm
    for k in range(n):
        for e in range(E):
            cc[e] = cos(sg[k] * ln[e])
            ss[e] = sin(sg[k] * ln[e])
        for r in range(R):
            for j in range(rp[r], rp[r + 1]):
                e = ee[j]
                if eq[j] == 0:
                    if en[j] == 0:
                        ca = 1.0
                        cb = 0.0
                    else:
                        ca = cc[e]
                        cb = ss[e]
                else:
                    if en[j] == 0:
                        ca = 0.0
                        cb = 1.0
                    else:
                        ca = ss[e]
                        cb = -cc[e]
                M[k, r, 2 * e] += es[j] * ca
                M[k, r, 2 * e + 1] += es[j] * cb
            nrm = 0.0
            for col in range(2 * E):
                w = M[k, r, col]
                nrm += w * w
            if nrm > 0.0:
                nrm = sqrt(nrm)
                for col in range(2 * E):
                    M[k, r, col] /= nrm
    return out


def binned_minplus(costs, masses, Py_ssize_t nbins, double total_mass):
    cdef Py_ssize_t m = len(costs)
    cdef double width = total_mass / nbins if total_mass > 0 else 1.0
    cost_a = np.full(nbins + 1, np.inf)
    mass_a = np.zeros(nbins + 1)
    cost_a[0] = 0.0
    choice_a = np.full((m, nbins + 1), -1, dtype=np.int64)
    parent_a = np.full((m, nbins + 1), -1, dtype=np.int64)
    cdef double[::1] cost = cost_a, mass = mass_a, nc, nm, ci, mi
    cdef long[:, ::1] choice = choice_a, parent = parent_a
    cdef Py_ssize_t i, b, o, t, nopt
    cdef double tm, tc
    for i in range(m):
        ci = np.ascontiguousarray(costs[i], dtype=np.float64)
        mi = np.ascontiguousarray(masses[i], dtype=np.float64)
        nopt = ci.shape[0]
        nc_a = np.full(nbins + 1, np.inf)
        nm_a = np.zeros(nbins + 1)
        nc = nc_a
        nm = nm_a
        for b in range(nbins + 1):
            if cost[b] == INFINITY:
                continue
            for o in range(nopt):
                tm = mass[b] + mi[o]
                tc = cost[b] + ci[o]
                t = <Py_ssize_t>(tm / width)
                if t > nbins:
                    t = nbins
                if tc < nc[t]:
                    nc[t] = tc
                    nm[t] = tm
                    choice[i, t] = o
                    parent[i, t] = b
        cost_a, mass_a = nc_a, nm_a
        cost = cost_a
        mass = mass_a
    return cost_a, mass_a, choice_a, parent_a
