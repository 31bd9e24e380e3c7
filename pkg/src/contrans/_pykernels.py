"""numpy implementation of the evaluation kernel (used when the extension is not built)."""

import numpy as np


def eval_program(ops, args, arity, offsets, tables, nvalues, assign):
    nnodes = len(ops)
    out = np.empty((nnodes, assign.shape[1]), dtype=np.uint8)
    for i in range(nnodes):
        op = ops[i]
        if op < 0:
            out[i] = assign[args[i, 0]]
            continue
        a = arity[op]
        if a == 0:
            out[i] = tables[offsets[op]]
            continue
        idx = out[args[i, 0]].astype(np.int64)
        for j in range(1, a):
            idx = idx * nvalues + out[args[i, j]]
        out[i] = tables[offsets[op] + idx]
    return out
