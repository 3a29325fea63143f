# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernel: one pass over the slot program, operating on
uint64 words (64 input vectors per word)."""

from libc.stdint cimport int32_t, uint8_t, uint64_t

DEF OP_INPUT = 0
DEF OP_OR = 1
DEF OP_AND = 2
DEF OP_ANDNOT = 3
DEF OP_BUF = 4


def eval_words(
    const uint8_t[::1] ops,
    const int32_t[::1] src_a,
    const int32_t[::1] src_b,
    uint64_t[:, ::1] values,
):
    """Fill every non-input slot row of ``values`` in program order."""
    cdef Py_ssize_t n_slots = values.shape[0]
    cdef Py_ssize_t n_words = values.shape[1]
    cdef Py_ssize_t s, w
    cdef int32_t a, b
    cdef uint8_t op

    for s in range(n_slots):
        op = ops[s]
        if op == OP_INPUT:
            continue
        a = src_a[s]
        b = src_b[s]
        if op == OP_OR:
            for w in range(n_words):
                values[s, w] = values[a, w] | values[b, w]
        elif op == OP_AND:
            for w in range(n_words):
                values[s, w] = values[a, w] & values[b, w]
        elif op == OP_ANDNOT:
            for w in range(n_words):
                values[s, w] = values[a, w] & ~values[b, w]
        elif op == OP_BUF:
            for w in range(n_words):
                values[s, w] = values[a, w]


def backend_name():
    return "compiled"
