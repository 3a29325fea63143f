#!/usr/bin/env python3
"""Benchmark the compiled evaluation kernel against the pure-Python fallback.

Runs random-vector batches through adders of several widths and reports
throughput (gate-evaluations per second) for both backends.
"""

import argparse
import time

import numpy as np

from rqlsim import build_kogge_stone
from rqlsim.sim import HAVE_COMPILED
from rqlsim.sim.encode import encode
from rqlsim.sim.engine import run_program


def bench(netlist, n_vectors, backend, repeats=3):
    program = encode(netlist)
    rng = np.random.default_rng(1)
    hi = (1 << netlist.width) - 1
    a = rng.integers(0, hi, n_vectors, dtype=np.uint64)
    b = rng.integers(0, hi, n_vectors, dtype=np.uint64)
    bits = {}
    for i in range(netlist.width):
        bits[f"A{i}"] = (a >> np.uint64(i)) & np.uint64(1)
        bits[f"B{i}"] = (b >> np.uint64(i)) & np.uint64(1)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        run_program(program, bits, n_vectors, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, program.n_slots


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--vectors", type=int, default=200_000)
    ap.add_argument("--widths", type=int, nargs="+", default=[8, 16, 32, 64])
    args = ap.parse_args()

    backends = ["python"] + (["compiled"] if HAVE_COMPILED else [])
    if not HAVE_COMPILED:
        print("note: compiled kernel not built, benchmarking fallback only")

    print(f"{'width':>5} {'slots':>6} {'backend':>9} {'time':>9} {'slot-evals/s':>13}")
    for width in args.widths:
        netlist = build_kogge_stone(width, idle_phases=0 if width > 16 else 1)
        times = {}
        for backend in backends:
            dt, n_slots = bench(netlist, args.vectors, backend)
            times[backend] = dt
            rate = n_slots * args.vectors / dt
            print(
                f"{width:>5} {n_slots:>6} {backend:>9} {dt * 1e3:>7.1f}ms "
                f"{rate:>12.3g}"
            )
        if len(times) == 2:
            print(
                f"{'':>5} {'':>6} {'speedup':>9} "
                f"{times['python'] / times['compiled']:>8.1f}x"
            )


if __name__ == "__main__":
    main()
