# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled field kernels: matrix product and Gauss-Jordan elimination."""

import numpy as np
cimport numpy as cnp

from libc.stdint cimport int64_t

cnp.import_array()


cdef struct Tables:
    const int64_t* exp
    const int64_t* log
    const int64_t* zech
    const int64_t* neg
    int64_t order


cdef inline int64_t gmul(Tables* t, int64_t a, int64_t b) noexcept nogil:
    if a == 0 or b == 0:
        return 0
    return t.exp[t.log[a] + t.log[b]]


cdef inline int64_t gadd(Tables* t, int64_t a, int64_t b) noexcept nogil:
    cdef int64_t la, d, z
    if a == 0:
        return b
    if b == 0:
        return a
    la = t.log[a]
    d = t.log[b] - la
    if d < 0:
        d += t.order
    z = t.zech[d]
    if z < 0:
        return 0
    return t.exp[la + z]


cdef inline int64_t ginv(Tables* t, int64_t a) noexcept nogil:
    if t.log[a] == 0:
        return t.exp[0]
    return t.exp[t.order - t.log[a]]


cdef Tables _tables(field,
                    const int64_t[::1] exp,
                    const int64_t[::1] log,
                    const int64_t[::1] zech,
                    const int64_t[::1] neg):
    cdef Tables t
    t.exp = &exp[0]
    t.log = &log[0]
    t.zech = &zech[0] if zech.shape[0] > 0 else NULL
    t.neg = &neg[0]
    t.order = field.order
    return t


def matmul(field, A, B):
    cdef const int64_t[::1] exp = field.exp_table
    cdef const int64_t[::1] log = field.log_table
    cdef const int64_t[::1] zech = field.zech_table
    cdef const int64_t[::1] neg = field.neg_table
    cdef Tables t = _tables(field, exp, log, zech, neg)
    cdef const int64_t[:, ::1] a = np.ascontiguousarray(A, dtype=np.int64)
    cdef const int64_t[:, ::1] b = np.ascontiguousarray(B, dtype=np.int64)
    cdef Py_ssize_t n = a.shape[0], K = a.shape[1], m = b.shape[1]
    out_arr = np.zeros((n, m), dtype=np.int64)
    cdef int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef int64_t aik, lik, bkj, z, d, la, acc
    with nogil:
        for i in range(n):
            for k in range(K):
                aik = a[i, k]
                if aik == 0:
                    continue
                lik = t.log[aik]
                for j in range(m):
                    bkj = b[k, j]
                    if bkj == 0:
                        continue
                    out[i, j] = gadd(&t, out[i, j], t.exp[lik + t.log[bkj]])
    return out_arr


def eliminate(field, M, Py_ssize_t ncols):
    cdef const int64_t[::1] exp = field.exp_table
    cdef const int64_t[::1] log = field.log_table
    cdef const int64_t[::1] zech = field.zech_table
    cdef const int64_t[::1] neg = field.neg_table
    cdef Tables t = _tables(field, exp, log, zech, neg)
    arr = np.array(M, dtype=np.int64, order="C", copy=True)
    cdef int64_t[:, ::1] a = arr
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1]
    cdef Py_ssize_t rank = 0, c, r, i, j
    cdef int64_t det = 1, piv, pinv, f, tmp
    pivots = []
    for c in range(ncols):
        if rank == rows:
            break
        r = -1
        for i in range(rank, rows):
            if a[i, c] != 0:
                r = i
                break
        if r < 0:
            continue
        with nogil:
            if r != rank:
                for j in range(cols):
                    tmp = a[rank, j]
                    a[rank, j] = a[r, j]
                    a[r, j] = tmp
                det = t.neg[det]
            piv = a[rank, c]
            det = gmul(&t, det, piv)
            pinv = ginv(&t, piv)
            for j in range(cols):
                a[rank, j] = gmul(&t, a[rank, j], pinv)
            for i in range(rows):
                if i == rank:
                    continue
                f = a[i, c]
                if f == 0:
                    continue
                f = t.neg[f]
                for j in range(c, cols):
                    if a[rank, j] != 0:
                        a[i, j] = gadd(&t, a[i, j], gmul(&t, f, a[rank, j]))
        pivots.append(c)
        rank += 1
    if rows != ncols or rank < rows:
        det = 0
    return arr, rank, det, pivots
