"""Command-line front end.

Subcommands: gen, validate, sim, margins, power, sidebands, clocknet.
Every run writes a manifest (arguments and seed) next to its outputs, and
all outputs are deterministic functions of the manifest.

Exit codes: 0 success, 1 check failure, 2 usage/parameter error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import adder, clocknet, power, sidebands
from .gates import ClockConfig, load_gate_table
from .netlist import Netlist, netlist_stats, validate
from .sim import (
    DEFAULT_OVERBIAS,
    InputProgram,
    backend_name,
    calibrate_overbias,
    margin_sweep,
    shift_register_pairs,
    simulate_logic,
    simulate_timed,
)
from .units import format_si, parse_frequency, parse_frequency_range


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(args, out: Path, extra=None) -> None:
    manifest = {
        "subcommand": args.command,
        "arguments": {
            k: v for k, v in sorted(vars(args).items()) if k != "func"
        },
        "seed": getattr(args, "seed", None),
    }
    if extra:
        manifest.update(extra)
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n"
    )


def _emit(args, payload: dict, table: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        print(table)


def _load_netlist(path) -> Netlist:
    return Netlist.load(path)


def _gate_table(args):
    if getattr(args, "config", None):
        return load_gate_table(args.config)
    return None


def cmd_gen(args) -> int:
    out = _out_dir(args)
    netlist = adder.build_kogge_stone(
        args.width,
        idle_phases=args.idle,
        idle_position=args.idle_position,
        chip_mode=args.chip_mode,
        max_fanout=args.max_fanout,
        gate_table=_gate_table(args),
        ptl_length_um=args.ptl_um,
    )
    path = out / f"adder{args.width}.rqlnet"
    netlist.save(path)
    stats = netlist_stats(netlist)
    f = parse_frequency(args.clock)
    lat = adder.latency(netlist, f)
    payload = {
        "netlist": path.name,
        "width": args.width,
        "phases": lat.phases,
        "cycles": lat.cycles,
        "latency_ps": lat.latency_ps,
        "clock_hz": f,
        "jj_total": stats.jj_total,
        "ic_avg_ua": stats.ic_avg_ua,
        "per_line_ic_ua": stats.per_line_ic_ua,
        "gate_counts": stats.gate_counts,
    }
    (out / "gen_stats.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
    _write_manifest(args, out)
    table = (
        f"{args.width}-bit adder -> {path}\n"
        f"phases {lat.phases}  cycles {lat.cycles:g}  "
        f"latency {lat.latency_ps:g} ps at {format_si(f, 'Hz')}\n"
        f"junctions {stats.jj_total}  ic_avg {stats.ic_avg_ua:g} uA"
    )
    _emit(args, payload, table)
    return 0


def cmd_validate(args) -> int:
    netlist = _load_netlist(args.netlist)
    diags = validate(netlist, max_fanout=args.max_fanout)
    out = _out_dir(args)
    (out / "validate.json").write_text(
        json.dumps({"diagnostics": diags}, indent=2) + "\n"
    )
    _write_manifest(args, out)
    if diags:
        for d in diags:
            print(d)
        return 1
    print("netlist clean")
    return 0


def _sim_vectors(args, netlist) -> list[tuple[int, int]]:
    if args.exhaustive:
        if netlist.width > 8:
            raise ValueError("exhaustive mode supports widths up to 8")
        n = 1 << netlist.width
        return [(a, b) for a in range(n) for b in range(n)]
    if args.vectors:
        pairs = []
        with open(args.vectors) as fh:
            for ln in fh:
                ln = ln.split("#")[0].strip()
                if not ln:
                    continue
                a_s, b_s = ln.replace(",", " ").split()
                pairs.append((int(a_s, 16), int(b_s, 16)))
        return pairs
    if args.serial:
        program = InputProgram.from_file(args.serial)
        return shift_register_pairs(program.serial_bits, netlist.width)
    if args.prbs is not None:
        seed = int(args.prbs, 0)
        cycles = args.cycles or 64
        bits = InputProgram.from_prbs(
            cycles + 2 * netlist.width - 1, seed
        ).serial_bits
        return shift_register_pairs(bits, netlist.width)[-cycles:]
    raise ValueError("choose a stimulus: --vectors, --serial, --prbs or --exhaustive")


def cmd_sim(args) -> int:
    netlist = _load_netlist(args.netlist)
    vectors = _sim_vectors(args, netlist)
    if args.timed:
        clock = ClockConfig(parse_frequency(args.clock), args.bias)
        trace = simulate_timed(netlist, clock, vectors, backend=args.backend)
    else:
        trace = simulate_logic(netlist, vectors, backend=args.backend)
    out = _out_dir(args)
    trace.to_csv(out / "trace.csv")

    failures = 0
    if args.check:
        mask = (1 << netlist.width) - 1
        for (a, b), s in zip(vectors, trace.sums):
            if (a + b) & mask != int(s):
                failures += 1
        if trace.couts is not None:
            for (a, b), c in zip(vectors, trace.couts):
                if ((a + b) >> netlist.width) & 1 != int(c):
                    failures += 1

    summary = {
        "vectors": trace.n_vectors,
        "pipeline_offset_cycles": trace.offset_cycles,
        "total_events": trace.total_events,
        "check_failures": failures if args.check else None,
        "backend": args.backend or backend_name(),
        "violations": [
            {"gate": v.name, "phase": v.phase, "arrival_ps": v.arrival_ps}
            for v in trace.violations
        ],
    }
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    _write_manifest(args, out)
    table = (
        f"{trace.n_vectors} vectors, {trace.total_events} switching events"
        + (
            f"\ncheck: {trace.n_vectors - failures}/{trace.n_vectors} pass"
            if args.check
            else ""
        )
        + (
            f"\ntiming violations: {len(trace.violations)}"
            if args.timed
            else ""
        )
    )
    _emit(args, summary, table)
    if args.check and failures:
        return 1
    if args.timed and trace.violations and args.check:
        return 1
    return 0


def cmd_margins(args) -> int:
    netlist = _load_netlist(args.netlist)
    f_lo = parse_frequency(args.fmin)
    f_hi = parse_frequency(args.fmax)
    freqs = np.linspace(f_lo, f_hi, args.steps)
    ceiling = args.ceiling
    if args.calibrate:
        ceiling = calibrate_overbias(netlist, parse_frequency(args.calibrate_at))
    curve = margin_sweep(netlist, freqs, ceiling=ceiling)
    out = _out_dir(args)
    curve.to_csv(out / "margins.csv")
    _write_manifest(args, out, {"ceiling": ceiling})
    rows = [
        {
            "frequency_hz": p.frequency_hz,
            "lower_db": p.lower_db,
            "upper_db": p.upper_db,
            "width_db": p.width_db,
        }
        for p in curve.points
    ]
    table_lines = ["frequency      lower_dB  upper_dB  width_dB"]
    for p in curve.points:
        table_lines.append(
            f"{format_si(p.frequency_hz, 'Hz'):<14} {p.lower_db:8.3f}  "
            f"{p.upper_db:8.3f}  {p.width_db:8.3f}"
        )
    _emit(args, {"points": rows, "ceiling": ceiling}, "\n".join(table_lines))
    return 0


def cmd_power(args) -> int:
    if args.scenario:
        scenario = power.load_scenario(args.scenario)
        n, ic = scenario.n_devices, scenario.ic_avg_a
        f = scenario.frequency_hz
        args.margin = scenario.margin_frac
        args.z = scenario.line_impedance_ohm
        args.budget = True
    elif args.netlist:
        if args.f is None:
            raise ValueError("--f is required with --netlist")
        stats = netlist_stats(_load_netlist(args.netlist))
        n = stats.jj_total
        ic = (stats.ic_avg_ua or 0.0) * 1e-6
        f = parse_frequency(args.f)
    else:
        if args.n is None or args.ic is None or args.f is None:
            raise ValueError(
                "give --scenario, --netlist, or all of --n/--ic/--f"
            )
        n, ic = args.n, args.ic
        f = parse_frequency(args.f)
    p = power.dynamic_power(ic, n, f)
    payload = {
        "p_dynamic_w": p,
        "n_junctions": n,
        "ic_avg_a": ic,
        "frequency_hz": f,
        "rsfq_bias_resistor_w": power.rsfq_static_equivalent(),
    }
    table = (
        f"P = 0.33 * Ic * Phi0 * N * f = {format_si(p, 'W')}  "
        f"(N={n:g}, Ic={format_si(ic, 'A')}, f={format_si(f, 'Hz')})"
    )
    if args.budget:
        scenario = power.ScalingScenario(
            n, ic, f, args.margin, args.z
        )
        budget = power.clock_budget(scenario)
        payload["budget"] = budget.to_dict()
        table += (
            f"\napplied clock power  {format_si(budget.p_applied_w, 'W')}"
            f"  (model-based)\nline current rms     "
            f"{format_si(budget.line_current_a, 'A')} on {args.z:g} ohm"
            f"\ntiming spread        {budget.timing_spread_ps:.2f} ps over "
            f"+/-{args.margin:.0%} bias"
        )
    out = _out_dir(args)
    (out / "power.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
    _write_manifest(args, out)
    _emit(args, payload, table)
    return 0


def cmd_sidebands(args) -> int:
    f_clock = parse_frequency(args.f_clock)
    active, _, zero = args.chop.partition(":")
    f_mod = sidebands.chop_fundamental(f_clock, int(active), int(zero))
    if args.measurements:
        mset = sidebands.load_measurements(args.measurements)
        lines = mset.lines
        fractions = mset.region_ic_fractions or {"cla_core": args.cla_frac}
    elif args.spectrum_q or args.spectrum_i:
        lines = {}
        for name, path in (("Q", args.spectrum_q), ("I", args.spectrum_i)):
            if path:
                freqs, powers = sidebands.read_spectrum_csv(path)
                lines[name] = sidebands.measure_from_spectrum(
                    freqs, powers, f_clock, f_mod
                )
        fractions = {"cla_core": args.cla_frac}
    else:
        if args.q is None or args.i is None:
            raise ValueError(
                "give --measurements, --spectrum-q/--spectrum-i, or --q/--i "
                "with --p0q/--p0i"
            )
        lines = {
            "Q": sidebands.SidebandMeasurement(args.p0q, args.q, f_clock, f_mod),
            "I": sidebands.SidebandMeasurement(args.p0i, args.i, f_clock, f_mod),
        }
        fractions = {"cla_core": args.cla_frac}

    per_line = {
        name: sidebands.am_pm_corrected_power(m, args.fraction)
        for name, m in lines.items()
    }
    report = power.attribute_power(
        per_line,
        fractions,
        parameters={
            "am_power_fraction": args.fraction,
            "ssb_db": {n: m.ssb_db for n, m in lines.items()},
            "p0_dbm": {n: m.p0_dbm for n, m in lines.items()},
            "f_mod_hz": next(iter(lines.values())).f_mod_hz,
        },
    )
    out = _out_dir(args)
    (out / "sidebands.json").write_text(report.to_json() + "\n")
    _write_manifest(args, out)
    table_lines = []
    for name, m in lines.items():
        up, _ = sidebands.ssb_power_upper_bound(m)
        table_lines.append(
            f"clock {name}: SSB {m.ssb_db:g} dB @ {m.p0_dbm:g} dBm -> "
            f"{format_si(per_line[name], 'W')} "
            f"(pure-AM bound {format_si(up, 'W')})"
        )
    table_lines.append(f"total dissipation: {format_si(report.p_total_w, 'W')}")
    for region, p in report.per_region_w.items():
        table_lines.append(f"  {region}: {format_si(p, 'W')}")
    _emit(args, report.to_dict(), "\n".join(table_lines))
    return 0


def cmd_clocknet(args) -> int:
    design = clocknet.design_transformer(
        args.zs,
        args.zl,
        args.sections,
        parse_frequency(args.f0),
        ripple_db=args.ripple,
        kind=args.kind,
    )
    f_lo, f_hi = parse_frequency_range(args.sweep)
    freqs = np.linspace(f_lo, f_hi, args.points)
    s = clocknet.cascade_sparams(design, freqs)
    rl = clocknet.return_loss_db(s[:, 0])
    out = _out_dir(args)
    design.to_csv(out / "transformer.csv")
    clocknet.sweep_to_csv(design, freqs, out / "sparams.csv")

    good = rl >= args.rl_target
    band = None
    if good.any():
        idx = np.flatnonzero(good)
        band = (float(freqs[idx[0]]), float(freqs[idx[-1]]))
    payload = {
        "section_impedances_ohm": list(design.section_impedances),
        "ripple_db": design.ripple_db,
        "fractional_bandwidth": design.fractional_bandwidth,
        "rl_target_db": args.rl_target,
        "band_meeting_target_hz": band,
    }
    _write_manifest(args, out)
    table = "sections: " + ", ".join(
        f"{z:.2f}" for z in design.section_impedances
    )
    if band:
        table += (
            f"\nreturn loss >= {args.rl_target:g} dB over "
            f"{format_si(band[0], 'Hz')} - {format_si(band[1], 'Hz')}"
        )
    _emit(args, payload, table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rqlsim",
        description="RQL adder generation, simulation and power analysis",
    )
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--config", help="gate parameter table (INI)")
    p.add_argument("--seed", type=int, default=0xACE1)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an adder netlist")
    g.add_argument("--width", type=int, default=8)
    g.add_argument("--idle", type=int, default=1)
    g.add_argument("--idle-position", type=int, default=None)
    g.add_argument("--chip-mode", action="store_true")
    g.add_argument("--max-fanout", type=int, default=4)
    g.add_argument("--ptl-um", type=float, default=None)
    g.add_argument("--clock", default="10GHz")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="check netlist invariants")
    v.add_argument("netlist")
    v.add_argument("--max-fanout", type=int, default=4)
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("sim", help="simulate a netlist")
    s.add_argument("--netlist", required=True)
    s.add_argument("--vectors", help="file of 'A B' hex pairs per cycle")
    s.add_argument("--serial", help="bit-string file for the shift register")
    s.add_argument("--prbs", help="LFSR seed (e.g. 0xACE1)")
    s.add_argument("--cycles", type=int)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--check", action="store_true")
    s.add_argument("--timed", action="store_true")
    s.add_argument("--clock", default="10GHz")
    s.add_argument("--bias", type=float, default=1.0)
    s.add_argument("--backend", choices=("auto", "compiled", "python"))
    s.set_defaults(func=cmd_sim)

    m = sub.add_parser("margins", help="clock-power margin sweep")
    m.add_argument("--netlist", required=True)
    m.add_argument("--fmin", default="4GHz")
    m.add_argument("--fmax", default="16GHz")
    m.add_argument("--steps", type=int, default=13)
    m.add_argument("--ceiling", type=float, default=DEFAULT_OVERBIAS)
    m.add_argument("--calibrate", action="store_true")
    m.add_argument("--calibrate-at", default="10GHz")
    m.set_defaults(func=cmd_margins)

    w = sub.add_parser("power", help="dynamic power and clock budget")
    w.add_argument("--n", type=float)
    w.add_argument("--ic", type=float, help="average critical current, A")
    w.add_argument("--f", help="clock frequency (unless --scenario gives it)")
    w.add_argument("--netlist")
    w.add_argument("--budget", action="store_true")
    w.add_argument("--scenario", help="scenario INI file (implies --budget)")
    w.add_argument("--margin", type=float, default=0.10)
    w.add_argument("--z", type=float, default=50.0)
    w.set_defaults(func=cmd_power)

    b = sub.add_parser("sidebands", help="sideband power measurement chain")
    b.add_argument("--measurements", help="descriptor INI file")
    b.add_argument("--spectrum-q", help="spectrum CSV (Hz, dBm) for clock Q")
    b.add_argument("--spectrum-i", help="spectrum CSV (Hz, dBm) for clock I")
    b.add_argument("--q", type=float, help="SSB on clock Q, dB")
    b.add_argument("--i", type=float, help="SSB on clock I, dB")
    b.add_argument("--p0q", type=float, help="carrier at chip on Q, dBm")
    b.add_argument("--p0i", type=float, help="carrier at chip on I, dBm")
    b.add_argument("--fraction", type=float, default=0.5)
    b.add_argument("--cla-frac", type=float, default=0.42)
    b.add_argument("--f-clock", default="6.2GHz")
    b.add_argument("--chop", default="12000:12000")
    b.set_defaults(func=cmd_sidebands)

    c = sub.add_parser("clocknet", help="clock feed transformer design")
    c.add_argument("--sections", type=int, default=6)
    c.add_argument("--zs", type=float, default=50.0)
    c.add_argument("--zl", type=float, default=4.0)
    c.add_argument("--f0", default="7.5GHz")
    c.add_argument("--ripple", type=float, default=-30.0)
    c.add_argument("--kind", choices=("chebyshev", "binomial"), default="chebyshev")
    c.add_argument("--sweep", default="1:20GHz")
    c.add_argument("--points", type=int, default=381)
    c.add_argument("--rl-target", type=float, default=30.0)
    c.set_defaults(func=cmd_clocknet)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"rqlsim: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"rqlsim: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
