"""Compile a netlist into a flat slot program for bit-parallel evaluation.

Every gate output pin becomes one value slot; slots are ordered topologically
so a single forward pass evaluates the whole DAG.  Values are uint64 words
holding 64 input vectors each, which both backends (compiled and pure
Python) consume unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..gates import N_OUTPUTS, GateKind
from ..netlist import Netlist, Pin

OP_INPUT = 0
OP_OR = 1
OP_AND = 2
OP_ANDNOT = 3
OP_BUF = 4


@dataclass
class Program:
    ops: np.ndarray  # uint8, per slot
    src_a: np.ndarray  # int32, per slot
    src_b: np.ndarray  # int32, per slot
    n_slots: int
    input_slots: dict[str, int]  # primary input name -> slot
    output_slots: dict[str, int]  # primary output name -> slot
    pin_slot: dict[Pin, int]
    gate_slots: list[tuple[int, int, int]]  # (gid, first slot, n_pins)


def encode(netlist: Netlist) -> Program:
    order = netlist.topo_order()
    pin_slot: dict[Pin, int] = {}
    ops: list[int] = []
    src_a: list[int] = []
    src_b: list[int] = []
    gate_slots: list[tuple[int, int, int]] = []
    input_slots: dict[str, int] = {}

    gid_to_input = {gid: name for name, gid in netlist.inputs.items()}

    for gid in order:
        g = netlist.gate(gid)
        kind = g.kind
        n_out = N_OUTPUTS[kind]
        first = len(ops)
        srcs = [pin_slot[p] for p in g.fanin]
        if kind is GateKind.ANDOR:
            ops += [OP_OR, OP_AND]
            src_a += [srcs[0], srcs[0]]
            src_b += [srcs[1], srcs[1]]
        elif kind is GateKind.ANOTB:
            ops.append(OP_ANDNOT)
            src_a.append(srcs[0])
            src_b.append(srcs[1])
        elif kind is GateKind.SPLIT:
            ops += [OP_BUF, OP_BUF]
            src_a += [srcs[0], srcs[0]]
            src_b += [0, 0]
        elif kind in (GateKind.DELAY, GateKind.PTL_DRIVER, GateKind.PTL_RECEIVER):
            ops.append(OP_BUF)
            src_a.append(srcs[0])
            src_b.append(0)
        elif kind is GateKind.SOURCE:
            ops.append(OP_INPUT)
            src_a.append(0)
            src_b.append(0)
            name = gid_to_input.get(gid)
            if name is not None:
                input_slots[name] = first
        elif kind is GateKind.SINK:
            continue  # no output pins
        for k in range(n_out):
            pin_slot[Pin(gid, k)] = first + k
        gate_slots.append((gid, first, n_out))

    output_slots = {
        name: pin_slot[pin] for name, pin in netlist.outputs.items()
    }
    return Program(
        ops=np.asarray(ops, dtype=np.uint8),
        src_a=np.asarray(src_a, dtype=np.int32),
        src_b=np.asarray(src_b, dtype=np.int32),
        n_slots=len(ops),
        input_slots=input_slots,
        output_slots=output_slots,
        pin_slot=pin_slot,
        gate_slots=gate_slots,
    )
