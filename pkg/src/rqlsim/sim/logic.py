"""Cycle-accurate logical simulation of phase-assigned netlists.

Wave pipelining moves one input vector through the pipe per clock cycle;
values are those of plain combinational evaluation, offset by the pipeline
depth in cycles.  Switching events are counted per gate output pin asserting
a logical one, since only ones dissipate power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..netlist import Netlist
from . import engine
from .encode import encode


@dataclass
class SimTrace:
    """Results of one simulation run.

    ``sums``/``couts`` are indexed by input vector (wave); a vector applied
    at cycle t produces its outputs at cycle t + ``offset_cycles``.  Timed
    runs add the static per-node arrival map and any window violations.
    """

    width: int
    n_vectors: int
    offset_cycles: int
    a: np.ndarray
    b: np.ndarray
    sums: np.ndarray
    couts: np.ndarray | None
    gate_events: np.ndarray  # per gate, summed over all vectors
    gate_ids: np.ndarray
    wave_events: np.ndarray | None  # per vector, summed over gates
    event_matrix: np.ndarray | None = None  # (gate, vector) counts, opt-in
    arrivals_ps: dict[int, float] | None = None
    violations: list = field(default_factory=list)

    @property
    def total_events(self) -> int:
        return int(self.gate_events.sum())

    def output_at_cycle(self, cycle: int) -> tuple[int, int | None]:
        """(sum, cout) visible at a given cycle; zeros while the pipe fills."""
        wave = cycle - self.offset_cycles
        if wave < 0 or wave >= self.n_vectors:
            return 0, (0 if self.couts is not None else None)
        cout = int(self.couts[wave]) if self.couts is not None else None
        return int(self.sums[wave]), cout

    def to_csv(self, path) -> None:
        """One row per cycle: inputs entering, outputs emerging, events of
        the wave entering that cycle."""
        n_cycles = self.n_vectors + self.offset_cycles
        with open(path, "w") as fh:
            cols = "cycle,a_hex,b_hex,s_hex"
            if self.couts is not None:
                cols += ",cout"
            fh.write(cols + ",events\n")
            for t in range(n_cycles):
                a = f"{int(self.a[t]):x}" if t < self.n_vectors else ""
                b = f"{int(self.b[t]):x}" if t < self.n_vectors else ""
                s, cout = self.output_at_cycle(t)
                ev = ""
                if self.wave_events is not None and t < self.n_vectors:
                    ev = str(int(self.wave_events[t]))
                row = f"{t},{a},{b},{s:x}"
                if self.couts is not None:
                    row += f",{cout}"
                fh.write(row + f",{ev}\n")


def _popcount_rows(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(values).sum(axis=1, dtype=np.int64)


def simulate_logic(
    netlist: Netlist,
    vectors,
    *,
    backend: str | None = None,
    want_wave_events: bool = True,
    want_event_matrix: bool = False,
) -> SimTrace:
    """Run input vectors (pairs of addends) through the netlist.

    ``vectors`` is a sequence of (A, B) integer pairs or two parallel
    arrays.  Raises on operands wider than the netlist.
    ``want_event_matrix`` additionally stores per-gate per-cycle switching
    counts (gates x vectors; mind the memory on large runs).
    """
    if isinstance(vectors, tuple) and len(vectors) == 2:
        a_vals = np.asarray(vectors[0], dtype=np.uint64)
        b_vals = np.asarray(vectors[1], dtype=np.uint64)
    else:
        pairs = list(vectors)
        a_vals = np.asarray([p[0] for p in pairs], dtype=np.uint64)
        b_vals = np.asarray([p[1] for p in pairs], dtype=np.uint64)
    if a_vals.shape != b_vals.shape:
        raise ValueError("A and B stimulus lengths differ")
    n = len(a_vals)
    limit = 1 << netlist.width
    if n and (int(a_vals.max()) >= limit or int(b_vals.max()) >= limit):
        raise ValueError(f"operand exceeds {netlist.width}-bit width")

    program = encode(netlist)
    input_bits = {}
    for i in range(netlist.width):
        input_bits[f"A{i}"] = (a_vals >> np.uint64(i)) & np.uint64(1)
        input_bits[f"B{i}"] = (b_vals >> np.uint64(i)) & np.uint64(1)
    values = engine.run_program(program, input_bits, n, backend=backend)

    sums = np.zeros(n, dtype=np.uint64)
    for i in range(netlist.width):
        slot = program.output_slots[f"S{i}"]
        sums |= engine.unpack_bits(values[slot], n).astype(np.uint64) << np.uint64(i)
    couts = None
    if "Cout" in program.output_slots:
        couts = engine.unpack_bits(values[program.output_slots["Cout"]], n)

    slot_pops = _popcount_rows(values)
    gate_ids = np.asarray([gid for gid, _, _ in program.gate_slots])
    gate_events = np.zeros(len(program.gate_slots), dtype=np.int64)
    for k, (_, first, n_out) in enumerate(program.gate_slots):
        gate_events[k] = slot_pops[first : first + n_out].sum()

    wave_events = None
    event_matrix = None
    if want_event_matrix and n:
        event_matrix = np.zeros((len(program.gate_slots), n), dtype=np.uint8)
    if (want_wave_events or want_event_matrix) and n:
        wave_events = np.zeros(n, dtype=np.int64)
        # Unpack in word blocks to bound memory on large runs.
        block = 4096
        for w0 in range(0, values.shape[1], block):
            chunk = values[:, w0 : w0 + block]
            bits = np.unpackbits(
                chunk.view(np.uint8), axis=1, bitorder="little"
            )
            lo = w0 * 64
            hi = min(lo + bits.shape[1], n)
            wave_events[lo:hi] += bits[:, : hi - lo].sum(axis=0, dtype=np.int64)
            if event_matrix is not None:
                for k, (_, first, n_out) in enumerate(program.gate_slots):
                    event_matrix[k, lo:hi] = bits[
                        first : first + n_out, : hi - lo
                    ].sum(axis=0, dtype=np.uint8)
    if not want_wave_events:
        wave_events = None

    offset = math.ceil(netlist.total_phases / 4)
    return SimTrace(
        width=netlist.width,
        n_vectors=n,
        offset_cycles=offset,
        a=a_vals,
        b=b_vals,
        sums=sums,
        couts=couts,
        gate_events=gate_events,
        gate_ids=gate_ids,
        wave_events=wave_events,
        event_matrix=event_matrix,
    )


def switching_activity(trace: SimTrace) -> tuple[dict[int, int], int]:
    """Per-gate and total switching-event counts of a trace."""
    per_gate = {
        int(gid): int(ev)
        for gid, ev in zip(trace.gate_ids, trace.gate_events)
    }
    return per_gate, trace.total_events
