"""Backend selection and the word-level evaluation entry point.

The compiled Cython kernel is used when the extension built; otherwise the
numpy fallback takes over transparently.  ``run_program`` owns the packing of
input vectors into words and returns the full slot/word value matrix.
"""

from __future__ import annotations

import numpy as np

from .encode import Program

try:
    from . import _kernel as _backend

    HAVE_COMPILED = True
except ImportError:  # extension not built
    from . import _kernel_py as _backend

    HAVE_COMPILED = False

from . import _kernel_py as _python_backend


def backend_name() -> str:
    return _backend.backend_name()


def _get_backend(name: str | None):
    if name in (None, "auto"):
        return _backend
    if name == "python":
        return _python_backend
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel is not available")
        from . import _kernel

        return _kernel
    raise ValueError(f"unknown backend {name!r}")


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Bool/0-1 array of length n -> uint64 words, vector i at bit i%64."""
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little")
    pad = (-len(packed)) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
    return packed.view(np.uint64)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of pack_bits, trimmed to n entries."""
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:n]


def run_program(
    program: Program,
    input_bits: dict[str, np.ndarray],
    n_vectors: int,
    backend: str | None = None,
) -> np.ndarray:
    """Evaluate all slots for ``n_vectors`` stimuli.

    ``input_bits`` maps primary input names to 0/1 arrays of length
    ``n_vectors``.  Returns the (n_slots, n_words) uint64 value matrix; tail
    bits of the last word beyond ``n_vectors`` are zero.
    """
    n_words = (n_vectors + 63) // 64
    values = np.zeros((program.n_slots, n_words), dtype=np.uint64)
    for name, slot in program.input_slots.items():
        try:
            bits = input_bits[name]
        except KeyError:
            raise ValueError(f"missing stimulus for input {name!r}") from None
        if len(bits) != n_vectors:
            raise ValueError(f"stimulus {name!r} has wrong length")
        values[slot] = pack_bits(bits)
    _get_backend(backend).eval_words(
        program.ops, program.src_a, program.src_b, values
    )
    # Mask tail bits so popcounts see only real vectors.
    tail = n_vectors % 64
    if tail:
        values[:, -1] &= np.uint64((1 << tail) - 1)
    return values
