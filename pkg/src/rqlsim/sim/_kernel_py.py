"""Pure-Python evaluation kernel: same contract as the compiled extension,
using numpy bitwise ops row-by-row over the word axis."""

from __future__ import annotations

import numpy as np

from .encode import OP_AND, OP_ANDNOT, OP_BUF, OP_INPUT, OP_OR


def eval_words(ops, src_a, src_b, values: np.ndarray) -> None:
    for s in range(values.shape[0]):
        op = ops[s]
        if op == OP_INPUT:
            continue
        a = values[src_a[s]]
        b = values[src_b[s]]
        if op == OP_OR:
            np.bitwise_or(a, b, out=values[s])
        elif op == OP_AND:
            np.bitwise_and(a, b, out=values[s])
        elif op == OP_ANDNOT:
            np.bitwise_and(a, np.bitwise_not(b), out=values[s])
        elif op == OP_BUF:
            values[s][:] = a


def backend_name():
    return "python"
