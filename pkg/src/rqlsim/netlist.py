"""Phase-assigned gate netlists: the artifact every analysis consumes.

A netlist is a DAG of gates.  Each gate carries its resolved device spec and
a clock phase; nets connect a driver output pin to consumer input pins and
may only go forward by at most one phase.  The text serialization is
versioned and round-trips losslessly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .gates import (
    N_INPUTS,
    N_OUTPUTS,
    GateKind,
    GateSpec,
    PhaseSlot,
)

NETLIST_FORMAT = "rqlnet 1"


class Pin(NamedTuple):
    gid: int
    pin: int


@dataclass(frozen=True)
class Gate:
    gid: int
    spec: GateSpec
    fanin: tuple[Pin, ...]
    phase: int
    name: str
    region: str = "cla_core"
    ptl_um: float | None = None  # incoming stripline length, PtlReceiver only

    @property
    def kind(self) -> GateKind:
        return self.spec.kind

    @property
    def slot(self) -> PhaseSlot:
        return PhaseSlot(self.phase)


class Netlist:
    """Immutable-by-convention container of gates plus named I/O."""

    def __init__(
        self,
        gates: Iterable[Gate],
        inputs: dict[str, int],
        outputs: dict[str, Pin],
        width: int,
        total_phases: int,
        idle_phases: tuple[int, ...] = (),
        chip_mode: bool = False,
    ):
        self.gates = list(gates)
        self.inputs = dict(inputs)
        self.outputs = dict(outputs)
        self.width = width
        self.total_phases = total_phases
        self.idle_phases = tuple(idle_phases)
        self.chip_mode = chip_mode
        self._by_gid = {g.gid: g for g in self.gates}
        if len(self._by_gid) != len(self.gates):
            raise ValueError("duplicate gate ids")
        self._topo: list[int] | None = None

    def __len__(self) -> int:
        return len(self.gates)

    def gate(self, gid: int) -> Gate:
        return self._by_gid[gid]

    def fanout_map(self) -> dict[Pin, list[tuple[int, int]]]:
        """Driver pin -> list of (consumer gid, input index)."""
        fo: dict[Pin, list[tuple[int, int]]] = {}
        for g in self.gates:
            for i, pin in enumerate(g.fanin):
                fo.setdefault(pin, []).append((g.gid, i))
        return fo

    def topo_order(self) -> list[int]:
        """Gate ids in topological order; raises on cycles."""
        if self._topo is not None:
            return self._topo
        indeg = {g.gid: len(g.fanin) for g in self.gates}
        consumers: dict[int, list[int]] = {}
        for g in self.gates:
            for pin in g.fanin:
                consumers.setdefault(pin.gid, []).append(g.gid)
        ready = sorted(gid for gid, d in indeg.items() if d == 0)
        order: list[int] = []
        while ready:
            gid = ready.pop()
            order.append(gid)
            for c in consumers.get(gid, ()):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(order) != len(self.gates):
            raise ValueError("netlist contains a cycle")
        self._topo = order
        return order

    def replace_gates(self, gates: Iterable[Gate], outputs=None) -> "Netlist":
        return Netlist(
            gates,
            self.inputs,
            outputs if outputs is not None else self.outputs,
            self.width,
            self.total_phases,
            self.idle_phases,
            self.chip_mode,
        )

    # -- serialization ----------------------------------------------------

    def dumps(self) -> str:
        lines = [NETLIST_FORMAT]
        lines.append(f"width {self.width}")
        lines.append(f"phases {self.total_phases}")
        if self.idle_phases:
            lines.append("idle " + ",".join(str(p) for p in self.idle_phases))
        lines.append(f"chip_mode {int(self.chip_mode)}")
        lines.append(
            "inputs " + " ".join(f"{n}:{g}" for n, g in self.inputs.items())
        )
        lines.append(
            "outputs "
            + " ".join(f"{n}:{p.gid}.{p.pin}" for n, p in self.outputs.items())
        )
        for g in sorted(self.gates, key=lambda g: g.gid):
            fanin = ",".join(f"{p.gid}.{p.pin}" for p in g.fanin)
            rec = (
                f"gate {g.gid} {g.kind.value} phase={g.phase} name={g.name} "
                f"region={g.region} fanin={fanin or '-'} "
                f"jj={g.spec.jj_count} ic={g.spec.ic_avg_ua!r} "
                f"seq={g.spec.seq_depth}"
            )
            if g.ptl_um is not None:
                rec += f" ptl={g.ptl_um!r}"
            lines.append(rec)
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "Netlist":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != NETLIST_FORMAT:
            raise ValueError("not a rqlnet file (bad or missing header)")
        header: dict[str, str] = {}
        gates: list[Gate] = []
        for ln in lines[1:]:
            key, _, rest = ln.partition(" ")
            if key != "gate":
                header[key] = rest.strip()
                continue
            fields = rest.split()
            gid = int(fields[0])
            kind = GateKind(fields[1])
            kv = dict(f.split("=", 1) for f in fields[2:])
            fanin_s = kv["fanin"]
            fanin = tuple(
                Pin(int(a), int(b))
                for a, b in (p.split(".") for p in fanin_s.split(",") if p != "-")
            )
            spec = GateSpec(kind, int(kv["jj"]), float(kv["ic"]), int(kv["seq"]))
            gates.append(
                Gate(
                    gid,
                    spec,
                    fanin,
                    int(kv["phase"]),
                    kv["name"],
                    kv["region"],
                    float(kv["ptl"]) if "ptl" in kv else None,
                )
            )
        inputs = {}
        for tok in header.get("inputs", "").split():
            name, _, gid = tok.partition(":")
            inputs[name] = int(gid)
        outputs = {}
        for tok in header.get("outputs", "").split():
            name, _, pin = tok.partition(":")
            a, b = pin.split(".")
            outputs[name] = Pin(int(a), int(b))
        idle = tuple(
            int(p) for p in header.get("idle", "").split(",") if p != ""
        )
        return cls(
            gates,
            inputs,
            outputs,
            int(header["width"]),
            int(header["phases"]),
            idle,
            bool(int(header.get("chip_mode", "0"))),
        )

    @classmethod
    def load(cls, path) -> "Netlist":
        with open(path) as fh:
            return cls.loads(fh.read())


def validate(netlist: Netlist, max_fanout: int = 4) -> list[str]:
    """Structural diagnostics; an empty list means the netlist is clean.

    Checks: acyclicity, per-kind arity, phase monotonicity (a net may only go
    from phase p to p or p+1), the fanout bound, that idle phases hold only
    interconnect cells, and that I/O references resolve.
    """
    diags: list[str] = []
    try:
        netlist.topo_order()
    except ValueError:
        diags.append("netlist contains a cycle")

    for g in netlist.gates:
        n_in = N_INPUTS[g.kind]
        if len(g.fanin) != n_in:
            diags.append(
                f"gate {g.gid} ({g.name}): {g.kind.value} arity "
                f"{len(g.fanin)} != {n_in}"
            )
        if not 0 <= g.phase < netlist.total_phases:
            diags.append(f"gate {g.gid} ({g.name}): phase {g.phase} out of range")
        if g.phase in netlist.idle_phases and g.kind in (
            GateKind.ANDOR,
            GateKind.ANOTB,
        ):
            diags.append(
                f"gate {g.gid} ({g.name}): logic gate in idle phase {g.phase}"
            )
        for pin in g.fanin:
            if pin.gid not in netlist._by_gid:
                diags.append(f"gate {g.gid} ({g.name}): dangling fanin {pin}")
                continue
            drv = netlist.gate(pin.gid)
            if pin.pin >= N_OUTPUTS[drv.kind]:
                diags.append(
                    f"gate {g.gid} ({g.name}): fanin pin {pin} does not exist"
                )
            if not g.phase - 1 <= drv.phase <= g.phase:
                diags.append(
                    f"net {drv.gid}->{g.gid}: phase {drv.phase} -> {g.phase} "
                    f"violates phase monotonicity"
                )

    for pin, consumers in netlist.fanout_map().items():
        if len(consumers) > max_fanout:
            diags.append(
                f"pin {pin.gid}.{pin.pin}: fanout {len(consumers)} exceeds "
                f"{max_fanout}"
            )

    for name, gid in netlist.inputs.items():
        if gid not in netlist._by_gid or netlist.gate(gid).kind is not GateKind.SOURCE:
            diags.append(f"input {name}: not a Source gate")
    for name, pin in netlist.outputs.items():
        if pin.gid not in netlist._by_gid:
            diags.append(f"output {name}: dangling pin {pin}")
    return diags


@dataclass
class NetlistStats:
    jj_total: int
    ic_sum_ua: float
    ic_avg_ua: float | None  # None for an empty netlist
    per_line_ic_ua: dict[str, float]
    per_region: dict[str, dict]  # region -> {jj, ic_ua, ic_fraction}
    gate_counts: dict[str, int] = field(default_factory=dict)


def netlist_stats(netlist: Netlist) -> NetlistStats:
    """Junction and critical-current totals, grouped by clock line (from the
    phase-to-I/Q mapping) and by region tag."""
    jj_total = 0
    ic_sum = 0.0
    per_line = {"I": 0.0, "Q": 0.0}
    per_region: dict[str, dict] = {}
    counts: dict[str, int] = {}
    for g in netlist.gates:
        jj, ic = g.spec.jj_count, g.spec.jj_count * g.spec.ic_avg_ua
        jj_total += jj
        ic_sum += ic
        counts[g.kind.value] = counts.get(g.kind.value, 0) + 1
        if jj:
            per_line[g.slot.clock_line] += ic
        reg = per_region.setdefault(g.region, {"jj": 0, "ic_ua": 0.0})
        reg["jj"] += jj
        reg["ic_ua"] += ic
    for reg in per_region.values():
        reg["ic_fraction"] = reg["ic_ua"] / ic_sum if ic_sum else 0.0
    return NetlistStats(
        jj_total=jj_total,
        ic_sum_ua=ic_sum,
        ic_avg_ua=(ic_sum / jj_total) if jj_total else None,
        per_line_ic_ua=per_line,
        per_region=per_region,
        gate_counts=counts,
    )
