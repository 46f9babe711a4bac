# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled speed kernels: boundary-matrix reduction and matching feasibility.

Output-identical to :mod:`topodrift._fallback`; selected by
:mod:`topodrift._speed` at import time.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc, realloc

IMPLEMENTATION = "compiled"


cdef inline Py_ssize_t _symdiff(const cnp.int32_t* a, Py_ssize_t na,
                                const cnp.int32_t* b, Py_ssize_t nb,
                                cnp.int32_t* out) nogil:
    cdef Py_ssize_t i = 0, j = 0, k = 0
    cdef cnp.int32_t x, y
    while i < na and j < nb:
        x = a[i]
        y = b[j]
        if x == y:
            i += 1
            j += 1
        elif x < y:
            out[k] = x
            k += 1
            i += 1
        else:
            out[k] = y
            k += 1
            j += 1
    while i < na:
        out[k] = a[i]
        k += 1
        i += 1
    while j < nb:
        out[k] = b[j]
        k += 1
        j += 1
    return k


def reduce_boundary(cnp.int32_t[::1] entries, cnp.int64_t[::1] offsets,
                    Py_ssize_t n_rows=-1):
    """Column reduction over the two-element field; see the fallback docs."""
    cdef Py_ssize_t n_cols = offsets.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pivots = np.full(n_cols, -1, dtype=np.int64)
    if n_cols == 0:
        return pivots
    if n_rows < 0:
        n_rows = (np.asarray(entries).max() + 1) if entries.shape[0] else 0
    if n_rows < 1:
        return pivots

    cdef cnp.int64_t[::1] piv = pivots
    # owner[row] = column whose reduced form has this pivot row, or -1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] owner_arr = np.full(n_rows, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] owner = owner_arr
    # reduced columns: (start, len) into `entries` (src 0) or `pool` (src 1)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] start_arr = np.zeros(n_cols, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] len_arr = np.zeros(n_cols, dtype=np.int64)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] src_arr = np.zeros(n_cols, dtype=np.int8)
    cdef cnp.int64_t[::1] col_start = start_arr
    cdef cnp.int64_t[::1] col_len = len_arr
    cdef cnp.int8_t[::1] col_src = src_arr

    cdef Py_ssize_t pool_cap = entries.shape[0] + 64
    cdef Py_ssize_t pool_used = 0
    cdef cnp.int32_t* pool = <cnp.int32_t*> malloc(pool_cap * sizeof(cnp.int32_t))
    cdef Py_ssize_t work_cap = 1024
    cdef cnp.int32_t* work_a = <cnp.int32_t*> malloc(work_cap * sizeof(cnp.int32_t))
    cdef cnp.int32_t* work_b = <cnp.int32_t*> malloc(work_cap * sizeof(cnp.int32_t))
    if pool is NULL or work_a is NULL or work_b is NULL:
        free(pool); free(work_a); free(work_b)
        raise MemoryError()

    cdef Py_ssize_t j, lw, need, other_len, d
    cdef cnp.int64_t own
    cdef cnp.int32_t p
    cdef const cnp.int32_t* other
    cdef cnp.int32_t* tmp
    cdef cnp.int32_t* newpool
    cdef bint copied
    try:
        for j in range(n_cols):
            lw = offsets[j + 1] - offsets[j]
            copied = False  # work_a holds the column only after the first addition
            while True:
                if lw == 0:
                    piv[j] = -1
                    break
                p = work_a[lw - 1] if copied else entries[offsets[j + 1] - 1]
                own = owner[p]
                if own < 0:
                    piv[j] = p
                    owner[p] = j
                    if copied:
                        if pool_used + lw > pool_cap:
                            while pool_used + lw > pool_cap:
                                pool_cap *= 2
                            newpool = <cnp.int32_t*> realloc(
                                pool, pool_cap * sizeof(cnp.int32_t))
                            if newpool is NULL:
                                raise MemoryError()
                            pool = newpool
                        for d in range(lw):
                            pool[pool_used + d] = work_a[d]
                        col_start[j] = pool_used
                        col_len[j] = lw
                        col_src[j] = 1
                        pool_used += lw
                    else:
                        col_start[j] = offsets[j]
                        col_len[j] = lw
                        col_src[j] = 0
                    break
                other_len = col_len[own]
                if col_src[own] == 0:
                    other = &entries[col_start[own]]
                else:
                    other = &pool[col_start[own]]
                need = lw + other_len
                if need > work_cap:
                    while need > work_cap:
                        work_cap *= 2
                    tmp = <cnp.int32_t*> realloc(work_b, work_cap * sizeof(cnp.int32_t))
                    if tmp is NULL:
                        raise MemoryError()
                    work_b = tmp
                    tmp = <cnp.int32_t*> realloc(work_a, work_cap * sizeof(cnp.int32_t))
                    if tmp is NULL:
                        raise MemoryError()
                    work_a = tmp
                if copied:
                    lw = _symdiff(work_a, lw, other, other_len, work_b)
                else:
                    lw = _symdiff(&entries[offsets[j]], lw, other, other_len, work_b)
                    copied = True
                tmp = work_a
                work_a = work_b
                work_b = tmp
    finally:
        free(pool)
        free(work_a)
        free(work_b)
    return pivots


def kuhn_cover(const cnp.uint8_t[:, ::1] adj, const cnp.uint8_t[::1] must):
    """Whether a matching covering all ``must`` rows exists; see fallback."""
    cdef Py_ssize_t n_rows = adj.shape[0]
    cdef Py_ssize_t n_cols = adj.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] match_arr = np.full(max(n_cols, 1), -1,
                                                              dtype=np.int64)
    cdef cnp.int64_t[::1] match_col = match_arr
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] vis_arr = np.zeros(max(n_cols, 1),
                                                             dtype=np.uint8)
    cdef cnp.uint8_t[::1] visited = vis_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rows_arr = np.zeros(n_rows + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ptrs_arr = np.zeros(n_rows + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] chosen_arr = np.zeros(n_rows + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] rows = rows_arr
    cdef cnp.int64_t[::1] ptrs = ptrs_arr
    cdef cnp.int64_t[::1] chosen = chosen_arr

    cdef Py_ssize_t r0, r, c, depth, d
    cdef bint ok, descended
    for r0 in range(n_rows):
        if not must[r0]:
            continue
        visited[:] = 0
        depth = 0
        rows[0] = r0
        ptrs[0] = 0
        ok = False
        while depth >= 0:
            r = rows[depth]
            c = ptrs[depth]
            descended = False
            while c < n_cols:
                if adj[r, c] != 0 and visited[c] == 0:
                    visited[c] = 1
                    if match_col[c] < 0:
                        match_col[c] = r
                        for d in range(depth):
                            match_col[chosen[d]] = rows[d]
                        ok = True
                        break
                    ptrs[depth] = c + 1
                    chosen[depth] = c
                    depth += 1
                    rows[depth] = match_col[c]
                    ptrs[depth] = 0
                    descended = True
                    break
                c += 1
            if ok:
                break
            if descended:
                continue
            depth -= 1
        if not ok:
            return False
    return True
