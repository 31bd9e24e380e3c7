# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation of formula programs over batches of valuations."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def eval_program(const int[::1] ops, const int[:, ::1] args, const int[::1] arity,
                 const long long[::1] offsets, const unsigned char[::1] tables,
                 int nvalues, const unsigned char[:, ::1] assign):
    cdef Py_ssize_t nnodes = ops.shape[0]
    cdef Py_ssize_t nval = assign.shape[1]
    out_arr = np.empty((nnodes, nval), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t i, v, j
    cdef int op, a
    cdef long long idx, base
    with nogil:
        for i in range(nnodes):
            op = ops[i]
            if op < 0:
                for v in range(nval):
                    out[i, v] = assign[args[i, 0], v]
                continue
            a = arity[op]
            base = offsets[op]
            if a == 0:
                for v in range(nval):
                    out[i, v] = tables[base]
            elif a == 1:
                for v in range(nval):
                    out[i, v] = tables[base + out[args[i, 0], v]]
            elif a == 2:
                for v in range(nval):
                    out[i, v] = tables[base + out[args[i, 0], v] * nvalues + out[args[i, 1], v]]
            else:
                for v in range(nval):
                    idx = 0
                    for j in range(a):
                        idx = idx * nvalues + out[args[i, j], v]
                    out[i, v] = tables[base + idx]
    return out_arr
