"""Static per-phase timing and clock-power operating margins.

Within one phase window, a pulse accumulates one junction delay per
sequential junction along its in-phase path, plus stripline propagation at
100 um/ps where a passive interconnect is annotated.  A gate whose output
settles after the acceptance window of its phase misses the clock peak and
is flagged.  The lower clock-power margin is the smallest relative bias that
clears all windows; the upper margin is the over-bias ceiling, a calibrated
constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..gates import ClockConfig, GateKind, junction_delay
from ..netlist import Netlist
from .logic import simulate_logic

PTL_SPEED_UM_PER_PS = 100.0

# Over-bias ceiling (relative amplitude) calibrated once so the 8-bit adder
# shows a 4.6 dB clock-power margin at 10 GHz; see calibrate_overbias.
DEFAULT_OVERBIAS = 1.63


@dataclass(frozen=True)
class TimingViolation:
    gid: int
    name: str
    phase: int
    arrival_ps: float
    window_ps: float

    @property
    def slack_ps(self) -> float:
        return self.window_ps - self.arrival_ps


def arrival_times(netlist: Netlist, clock: ClockConfig) -> dict[int, float]:
    """Static arrival offset (ps) of every gate output within its phase."""
    arr: dict[int, float] = {}
    d = junction_delay(clock.bias_rel)
    for gid in netlist.topo_order():
        g = netlist.gate(gid)
        t = 0.0
        for pin in g.fanin:
            drv = netlist.gate(pin.gid)
            if drv.phase == g.phase:
                t = max(t, arr[pin.gid])
        if g.kind is GateKind.PTL_RECEIVER:
            if g.ptl_um is None:
                raise ValueError(
                    f"gate {g.gid} ({g.name}): PTL receiver lacks a length "
                    f"annotation"
                )
            t += g.ptl_um / PTL_SPEED_UM_PER_PS
        arr[gid] = t + g.spec.seq_depth * d
    return arr


def check_windows(
    netlist: Netlist, clock: ClockConfig
) -> tuple[dict[int, float], list[TimingViolation]]:
    arr = arrival_times(netlist, clock)
    window = clock.window_ps
    violations = [
        TimingViolation(g.gid, g.name, g.phase, arr[g.gid], window)
        for g in netlist.gates
        if g.spec.jj_count > 0 and arr[g.gid] > window
    ]
    return arr, violations


def worst_arrival(netlist: Netlist, clock: ClockConfig) -> float:
    arr = arrival_times(netlist, clock)
    return max(
        (arr[g.gid] for g in netlist.gates if g.spec.jj_count > 0),
        default=0.0,
    )


def simulate_timed(netlist: Netlist, clock: ClockConfig, vectors, **kw):
    """Logical simulation plus arrival offsets and window violations."""
    trace = simulate_logic(netlist, vectors, **kw)
    arr, violations = check_windows(netlist, clock)
    trace.arrivals_ps = arr
    trace.violations = violations
    return trace


@dataclass(frozen=True)
class MarginPoint:
    frequency_hz: float
    lower_db: float  # clock power relative to nominal, dB
    upper_db: float

    @property
    def operable(self) -> bool:
        return not math.isnan(self.lower_db) and self.lower_db <= self.upper_db

    @property
    def width_db(self) -> float:
        return self.upper_db - self.lower_db


@dataclass
class MarginCurve:
    points: list[MarginPoint]

    def widths(self) -> list[float]:
        return [p.width_db for p in self.points]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("frequency_hz,lower_db,upper_db,width_db\n")
            for p in self.points:
                fh.write(
                    f"{p.frequency_hz:.6g},{p.lower_db:.6f},"
                    f"{p.upper_db:.6f},{p.width_db:.6f}\n"
                )


def _power_db(bias_rel: float) -> float:
    return 20.0 * math.log10(bias_rel)


def min_operating_bias(
    netlist: Netlist,
    frequency_hz: float,
    *,
    ceiling: float = DEFAULT_OVERBIAS,
    receiver_window_frac: float = 0.0,
    bias_grid=None,
) -> float:
    """Smallest relative bias with zero timing violations, or NaN if not
    reachable below the ceiling.

    With a grid the answer is the first clean grid point (useful as an
    independent check); otherwise the monotone violation boundary is
    bisected.
    """

    def clean(b: float) -> bool:
        clock = ClockConfig(frequency_hz, b, receiver_window_frac)
        return not check_windows(netlist, clock)[1]

    if bias_grid is not None:
        for b in sorted(bias_grid):
            if b <= 0:
                raise ValueError("bias grid must be positive")
            if b <= ceiling and clean(b):
                return b
        return math.nan

    if math.isinf(ceiling):
        hi = 1.0
        for _ in range(64):
            if clean(hi):
                break
            hi *= 2.0
        else:
            return math.nan
    else:
        if not clean(ceiling):
            return math.nan
        hi = ceiling
    lo = 1e-6
    if clean(lo):
        return lo
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if clean(mid):
            hi = mid
        else:
            lo = mid
    return hi


def margin_sweep(
    netlist: Netlist,
    frequencies,
    *,
    bias_grid=None,
    ceiling: float = DEFAULT_OVERBIAS,
    receiver_window_frac: float = 0.0,
) -> MarginCurve:
    """Clock-power margins over a frequency range.

    The upper limit is the over-bias ceiling and therefore identical at
    every frequency; the lower limit rises with clock rate as the phase
    windows shrink.
    """
    freqs = list(frequencies)
    if not freqs:
        raise ValueError("empty frequency range")
    upper = _power_db(ceiling)
    points = []
    for f in freqs:
        b_min = min_operating_bias(
            netlist,
            f,
            ceiling=ceiling,
            receiver_window_frac=receiver_window_frac,
            bias_grid=bias_grid,
        )
        lower = _power_db(b_min) if not math.isnan(b_min) else math.nan
        points.append(MarginPoint(f, lower, upper))
    return MarginCurve(points)


def calibrate_overbias(
    netlist: Netlist,
    frequency_hz: float = 10e9,
    width_db: float = 4.6,
    receiver_window_frac: float = 0.0,
) -> float:
    """Over-bias ceiling that makes the margin at one frequency come out to
    ``width_db`` exactly.  This is a calibration, not a prediction: the
    physics of gate over-bias is outside the model."""
    b_min = min_operating_bias(
        netlist,
        frequency_hz,
        ceiling=math.inf,
        receiver_window_frac=receiver_window_frac,
    )
    if math.isnan(b_min):
        raise ValueError("circuit has no operating point at this frequency")
    return b_min * 10.0 ** (width_db / 20.0)
