"""Command-line front end: scenario reports, sweep/trace CSVs, beam tables,
and catalog comparison.

All numeric output uses scientific notation with 9 significant digits and
plain ASCII separators, so identical inputs give byte-identical files.

Exit codes: 0 success, 2 configuration problem, 4 simulation that did not
reach steady state, 3 any other numerical precondition failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from typing import Sequence

from .analysis import compare_catalog
from .beam import BeamSpec, frequency_table
from .config import Catalog, ConfigError, Scenario, load_catalog
from .model import (
    Excitation,
    check_displacement_limit,
    damping_coefficient_from_ratio,
    evaluate_response,
    natural_frequency,
    optimal_load,
)
from .sim import SimConfig, SimulationNotSettled, SweepPointError, simulate

__all__ = ["main"]


def _num(x: float) -> str:
    return "%.8e" % x


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load_scenario(args: argparse.Namespace) -> tuple[Catalog, Scenario]:
    catalog = load_catalog(args.config)
    scn = catalog.scenario(args.scenario)
    if args.accel_tag:
        scn = replace(scn, accel_tag=args.accel_tag)
    return catalog, scn


def _cmd_model(args: argparse.Namespace) -> int:
    _, scn = _load_scenario(args)
    g, c = scn.generator.params, scn.generator.circuit
    w = 2.0 * math.pi * scn.freq_hz
    e = Excitation.from_acceleration(scn.accel_m_s2, w, scn.accel_tag)
    rp = evaluate_response(g, c, e)
    wn = natural_frequency(g)
    lines = [
        f"scenario                : {scn.name}",
        f"generator               : {scn.generator.name}",
        f"drive frequency Hz      : {_num(scn.freq_hz)}",
        f"natural frequency Hz    : {_num(wn / (2.0 * math.pi))}",
        f"natural frequency rad/s : {_num(wn)}",
        f"base accel m/s^2 ({scn.accel_tag})  : {_num(scn.accel_m_s2)}",
        f"base amplitude m (peak) : {_num(e.amplitude_m)}",
        f"relative amplitude m    : {_num(rp.z_amplitude_m)}",
        f"phase lag rad           : {_num(rp.phase_rad)}",
        f"dissipated power W      : {_num(rp.p_dissipated_w)}",
        f"load power W            : {_num(rp.p_load_w)}",
        f"total electrical W      : {_num(rp.p_total_electrical_w)}",
        f"load voltage V rms      : {_num(rp.v_load_rms_v)}",
    ]
    if g.zeta_parasitic > 0.0 and c.coupling_v_s_per_m > 0.0:
        c_par = damping_coefficient_from_ratio(g.zeta_parasitic, g)
        lines.append(f"optimal load ohm        : {_num(optimal_load(c, c_par))}")
    check = check_displacement_limit(g, rp.z_amplitude_m)
    if check.margin_m is None:
        lines.append("displacement limit      : none configured")
    else:
        verdict = "pass" if check.passed else "FAIL"
        lines.append(
            f"displacement limit      : {verdict} (margin m = {_num(check.margin_m)})"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    _, scn = _load_scenario(args)
    g, c = scn.generator.params, scn.generator.circuit
    if args.kind == "frequency":
        rng = scn.freq_sweep
        if rng is None:
            raise ConfigError(f"scenario {scn.name!r} defines no frequency sweep range")
        rows = ["freq_hz,z_amp_m,emf_rms_v,p_load_w"]
        for f_hz in rng.values():
            w = 2.0 * math.pi * f_hz
            e = Excitation.from_acceleration(scn.accel_m_s2, w, scn.accel_tag)
            rp = evaluate_response(g, c, e)
            emf_rms = c.coupling_v_s_per_m * rp.z_amplitude_m * w / math.sqrt(2.0)
            rows.append(
                ",".join(
                    _num(v) for v in (f_hz, rp.z_amplitude_m, emf_rms, rp.p_load_w)
                )
            )
    else:
        rng = scn.load_sweep
        if rng is None:
            raise ConfigError(f"scenario {scn.name!r} defines no load sweep range")
        w = 2.0 * math.pi * scn.freq_hz
        e = Excitation.from_acceleration(scn.accel_m_s2, w, scn.accel_tag)
        rows = ["r_load_ohm,p_load_w,p_total_w"]
        for r_load in rng.values():
            rp = evaluate_response(g, replace(c, r_load_ohm=r_load), e)
            rows.append(
                ",".join(
                    _num(v) for v in (r_load, rp.p_load_w, rp.p_total_electrical_w)
                )
            )
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    _, scn = _load_scenario(args)
    g, c = scn.generator.params, scn.generator.circuit
    w = 2.0 * math.pi * scn.freq_hz
    e = Excitation.from_acceleration(scn.accel_m_s2, w, scn.accel_tag)
    cfg = scn.sim if scn.sim is not None else SimConfig.suggest(g, c, w)
    if args.out:
        summary, trace = simulate(g, c, e, cfg, return_trace=True)
    else:
        summary = simulate(g, c, e, cfg)
        trace = None
    lines = [
        f"scenario                : {scn.name}",
        f"steps                   : {int(round(cfg.duration_s / cfg.dt_s))}",
        f"dt s                    : {_num(cfg.dt_s)}",
        f"duration s              : {_num(cfg.duration_s)}",
        f"relative amplitude m    : {_num(summary.z_amp_m)}",
        f"relative velocity rms   : {_num(summary.v_rel_rms_m_per_s)}",
        f"emf V rms               : {_num(summary.emf_rms_v)}",
        f"load power W            : {_num(summary.p_load_avg_w)}",
        f"parasitic power W       : {_num(summary.p_parasitic_avg_w)}",
        f"phase lag rad           : {_num(summary.phase_rad)}",
        f"energy residual         : {_num(summary.energy_balance_residual)}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if trace is not None:
        rows = ["t_s,z_m,zdot_m_s,emf_v,p_load_w"]
        for i in range(len(trace.t_s)):
            rows.append(
                ",".join(
                    _num(v)
                    for v in (
                        trace.t_s[i],
                        trace.z_m[i],
                        trace.zdot_m_s[i],
                        trace.emf_v[i],
                        trace.p_load_w[i],
                    )
                )
            )
        _emit("\n".join(rows) + "\n", args.out)
    return 0


def _cmd_beam(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.config)
    if args.materials:
        names = [s.strip() for s in args.materials.split(",") if s.strip()]
        missing = [n for n in names if n not in catalog.materials]
        if missing:
            raise ConfigError(
                "unknown material(s): " + ", ".join(missing)
                + "; available: " + ", ".join(sorted(catalog.materials) or ["(none)"])
            )
        mats = [catalog.materials[n] for n in names]
    else:
        if not catalog.materials:
            raise ConfigError("catalog has no material sections")
        mats = [catalog.materials[n] for n in sorted(catalog.materials)]
    try:
        thicknesses = [float(s) for s in args.thicknesses.split(",") if s.strip()]
    except ValueError as err:
        raise ConfigError(f"--thicknesses: {err}") from err
    if not thicknesses:
        raise ConfigError("--thicknesses: empty list")
    base = BeamSpec(
        length_m=args.length,
        width_m=args.width,
        thickness_m=thicknesses[0],
        material=mats[0],
        tip_mass_kg=args.tip_mass,
    )
    grid = frequency_table(base, thicknesses, mats)
    rows = ["thickness_m," + ",".join(f"{m.name}_hz" for m in mats)]
    for t, freqs in zip(thicknesses, grid):
        rows.append(",".join([_num(t)] + [_num(f) for f in freqs]))
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.config)
    if not catalog.devices:
        raise ConfigError("catalog has no device sections")
    devices = sorted(catalog.devices.values(), key=lambda d: d.name)
    rows = compare_catalog(devices, args.target_accel)
    lines = [
        f"power density ranking at {_num(args.target_accel)} m/s^2",
        f"{'rank':<6}{'name':<20}{'volume_mm3':>16}{'raw_power_w':>16}"
        f"{'norm_power_w':>16}{'density_nw_mm3':>17}",
    ]
    for i, r in enumerate(rows, 1):
        lines.append(
            f"{i:<6}{r.name:<20}{_num(r.volume_mm3):>16}{_num(r.raw_power_w):>16}"
            f"{_num(r.normalized_power_w):>16}{_num(r.power_density_nw_mm3):>17}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


_HANDLERS = {
    "model": _cmd_model,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "beam": _cmd_beam,
    "compare": _cmd_compare,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emharvest",
        description="Resonant electromagnetic vibration harvester toolbox",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="catalog file (default: bundled catalog)")
    common.add_argument("--out", help="write output to this file instead of stdout")

    scenario_common = argparse.ArgumentParser(add_help=False, parents=[common])
    scenario_common.add_argument("--scenario", required=True, help="scenario name")
    scenario_common.add_argument(
        "--accel-tag",
        choices=("peak", "rms"),
        help="override the scenario's acceleration amplitude convention",
    )

    sub.add_parser(
        "model",
        parents=[scenario_common],
        help="closed-form steady-state report for one scenario",
    )

    p_sweep = sub.add_parser(
        "sweep",
        parents=[scenario_common],
        help="frequency or load-resistance sweep CSV",
    )
    p_sweep.add_argument("--kind", choices=("frequency", "load"), required=True)

    sub.add_parser(
        "simulate",
        parents=[scenario_common],
        help="time-domain run; --out writes the full trace CSV",
    )

    p_beam = sub.add_parser(
        "beam",
        parents=[common],
        help="cantilever frequency table over thickness and material",
    )
    p_beam.add_argument("--length", type=float, required=True, help="beam length, m")
    p_beam.add_argument("--width", type=float, required=True, help="beam width, m")
    p_beam.add_argument(
        "--tip-mass", type=float, required=True, help="tip mass, kg", dest="tip_mass"
    )
    p_beam.add_argument(
        "--thicknesses",
        required=True,
        help="comma-separated beam thicknesses, m, strictly increasing",
    )
    p_beam.add_argument(
        "--materials",
        help="comma-separated material names (default: all, name order)",
    )

    p_cmp = sub.add_parser(
        "compare",
        parents=[common],
        help="rank catalog devices by normalized power density",
    )
    p_cmp.add_argument(
        "--target-accel",
        type=float,
        default=3.0,
        dest="target_accel",
        help="base acceleration to normalize to, m/s^2 (default 3.0)",
    )

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except SimulationNotSettled as err:
        print(f"error: simulation did not settle: {err}", file=sys.stderr)
        return 4
    except SweepPointError as err:
        print(f"error: {err}", file=sys.stderr)
        return 4 if isinstance(err.cause, SimulationNotSettled) else 3
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
