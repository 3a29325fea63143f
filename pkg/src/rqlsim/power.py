"""Dynamic power of RQL circuits and VLSI-scale clock budgeting.

The fully-active dissipation is P = 0.33 * Ic * Phi0 * N * f (the 0.33
prefactor is the experimentally determined fraction of the per-junction flux
transfer that is dissipated).  Activity-weighted power decomposes the same
total into per-switching-event energies so a simulation trace scales it by
actual data activity: zeros dissipate nothing.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass, field

from .gates import N_OUTPUTS, NOMINAL_JUNCTION_DELAY_PS, PHI0_VS
from .netlist import Netlist
from .sim.logic import SimTrace
from .units import format_si

DYNAMIC_PREFACTOR = 0.33

# Reference gate tolerance to clock-amplitude variation; the applied-power
# rule is anchored here (see clock_budget).
NOMINAL_MARGIN_FRAC = 0.10

CRYOCOOLER_OVERHEAD_W_PER_W = 1000.0


def dynamic_power(ic_avg_a: float, n_junctions: float, frequency_hz: float) -> float:
    """Fully-active dynamic dissipation in watts (Ic in amps)."""
    if ic_avg_a < 0 or n_junctions < 0 or frequency_hz < 0:
        raise ValueError("power model arguments must be non-negative")
    return DYNAMIC_PREFACTOR * ic_avg_a * PHI0_VS * n_junctions * frequency_hz


def activity_power(trace: SimTrace, netlist: Netlist, frequency_hz: float) -> float:
    """Trace-weighted dissipation in watts.

    Each output pin asserting a one in a cycle fires that gate's junctions
    once, apportioned over its output pins, so a trace in which every pin of
    every gate switches every cycle reproduces ``dynamic_power`` exactly.
    """
    if trace.n_vectors == 0:
        return 0.0
    energy = 0.0
    per_gate, _ = _events_by_gate(trace)
    for g in netlist.gates:
        if g.spec.jj_count == 0:
            continue
        events = per_gate.get(g.gid, 0)
        if not events:
            continue
        n_out = max(1, N_OUTPUTS[g.kind])
        e_gate = (
            DYNAMIC_PREFACTOR
            * (g.spec.ic_avg_ua * 1e-6)
            * PHI0_VS
            * g.spec.jj_count
            / n_out
        )
        energy += events * e_gate
    return energy * frequency_hz / trace.n_vectors


def _events_by_gate(trace: SimTrace):
    per_gate = {
        int(gid): int(ev) for gid, ev in zip(trace.gate_ids, trace.gate_events)
    }
    return per_gate, trace.total_events


@dataclass
class PowerReport:
    p_total_w: float
    per_line_w: dict[str, float]
    per_region_w: dict[str, float]
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "p_total_w": self.p_total_w,
            "per_line_w": self.per_line_w,
            "per_region_w": self.per_region_w,
            "parameters": self.parameters,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_table(self) -> str:
        lines = [f"total dissipation     {format_si(self.p_total_w, 'W')}"]
        for line, p in sorted(self.per_line_w.items()):
            lines.append(f"clock {line:<15} {format_si(p, 'W')}")
        for region, p in self.per_region_w.items():
            lines.append(f"region {region:<14} {format_si(p, 'W')}")
        rsfq = rsfq_static_equivalent()
        lines.append(
            f"(one RSFQ bias resistor dissipates {format_si(rsfq, 'W')} "
            f"statically; cryocooler overhead is of order "
            f"{CRYOCOOLER_OVERHEAD_W_PER_W:.0f} W/W)"
        )
        return "\n".join(lines)


def attribute_power(
    per_line_w: dict[str, float],
    region_ic_fractions: dict[str, float],
    parameters: dict | None = None,
) -> PowerReport:
    """Split measured per-clock-line dissipation across subcircuit regions
    in proportion to their critical-current share."""
    total = sum(per_line_w.values())
    frac_sum = 0.0
    for region, frac in region_ic_fractions.items():
        if not 0.0 <= frac <= 1.0:
            raise ValueError(f"region {region}: fraction {frac} outside [0, 1]")
        frac_sum += frac
    if frac_sum > 1.0 + 1e-9:
        raise ValueError(f"region fractions sum to {frac_sum:.4f} > 1")
    per_region = {r: f * total for r, f in region_ic_fractions.items()}
    return PowerReport(total, dict(per_line_w), per_region, parameters or {})


@dataclass(frozen=True)
class ScalingScenario:
    """A what-if chip for clock budgeting."""

    n_devices: float
    ic_avg_a: float
    frequency_hz: float
    margin_frac: float = NOMINAL_MARGIN_FRAC  # tolerated clock variation, +/-
    line_impedance_ohm: float = 50.0
    seq_junctions_per_phase: int = 8

    def __post_init__(self):
        if min(self.n_devices, self.ic_avg_a, self.frequency_hz) <= 0:
            raise ValueError("scenario parameters must be positive")
        if not 0.0 < self.margin_frac < 1.0:
            raise ValueError("margin_frac must be in (0, 1)")
        if self.line_impedance_ohm <= 0:
            raise ValueError("line impedance must be positive")


@dataclass
class ClockBudget:
    p_dissipated_w: float
    p_applied_w: float
    line_current_a: float
    timing_spread_ps: float

    def to_dict(self) -> dict:
        return {
            "p_dissipated_w": self.p_dissipated_w,
            "p_applied_w": self.p_applied_w,
            "line_current_a": self.line_current_a,
            "timing_spread_ps": self.timing_spread_ps,
            "note": "applied power is model-based (flux-transfer budget "
            "scaled by nominal/actual tolerance)",
        }


def line_current_rms(p_applied_w: float, impedance_ohm: float = 50.0) -> float:
    return math.sqrt(p_applied_w / impedance_ohm)


def timing_spread_ps(
    margin_frac: float,
    seq_junctions: int = 8,
    d0_ps: float = NOMINAL_JUNCTION_DELAY_PS,
) -> float:
    """Spread of one worst-case sequential chain over the bias window
    [1-m, 1+m] under the d0/bias delay model."""
    lo, hi = 1.0 - margin_frac, 1.0 + margin_frac
    return seq_junctions * d0_ps * (1.0 / lo - 1.0 / hi)


def clock_budget(scenario: ScalingScenario) -> ClockBudget:
    """Applied clock power, line current and timing spread for a scenario.

    The line must carry the full per-junction flux-transfer power
    Ic*Phi0*N*f (of which the 0.33 prefactor is dissipated) when gates
    tolerate the nominal +/-10% amplitude variation; a tighter tolerance
    demands proportionally more applied power.  This rule is a documented
    model, not measurement-derived arithmetic.
    """
    p_diss = dynamic_power(
        scenario.ic_avg_a, scenario.n_devices, scenario.frequency_hz
    )
    p_applied = (
        p_diss / DYNAMIC_PREFACTOR * (NOMINAL_MARGIN_FRAC / scenario.margin_frac)
    )
    return ClockBudget(
        p_dissipated_w=p_diss,
        p_applied_w=p_applied,
        line_current_a=line_current_rms(p_applied, scenario.line_impedance_ohm),
        timing_spread_ps=timing_spread_ps(
            scenario.margin_frac, scenario.seq_junctions_per_phase
        ),
    )


def rsfq_static_equivalent(
    bias_current_a: float = 200e-6, bus_voltage_v: float = 2.6e-3
) -> float:
    """Static dissipation of a single RSFQ bias resistor, for context."""
    return bias_current_a * bus_voltage_v


def load_scenario(path) -> ScalingScenario:
    """Read a [scenario] section from an INI file (same format family as
    the gate table): n_devices, ic_avg (amps), frequency (Hz), optional
    margin_frac, line_impedance, seq_junctions_per_phase."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise OSError(f"cannot read scenario file {path!r}")
    if "scenario" not in cp:
        raise ValueError(f"{path}: missing [scenario] section")
    sec = cp["scenario"]
    return ScalingScenario(
        n_devices=sec.getfloat("n_devices"),
        ic_avg_a=sec.getfloat("ic_avg"),
        frequency_hz=sec.getfloat("frequency"),
        margin_frac=sec.getfloat("margin_frac", fallback=NOMINAL_MARGIN_FRAC),
        line_impedance_ohm=sec.getfloat("line_impedance", fallback=50.0),
        seq_junctions_per_phase=sec.getint(
            "seq_junctions_per_phase", fallback=8
        ),
    )
