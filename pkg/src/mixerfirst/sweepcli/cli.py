"""Command-line entry point.

Exit codes: 0 success, 1 configuration, usage or file error, 2 numerical
failure (including sweep points that could not be evaluated).
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from ..matchsynth import SynthesisError
from ..netcore import NetworkError
from ..lptv import (
    SimulationError,
    build_network,
    lo_for,
    measure_conversion_gain,
    measure_vds_peak,
    measure_zin,
    simulate_pss,
)
from .calibrate import CalibrationError, calibrate_r_ol, oracle_frequency
from .config import FORMATS, ORACLE_MODES, ConfigError, SweepConfig, load_config
from .emit import EmitError, emit
from .sweep import VERIFY_ZIN_TOL, prepare_variant, run_sweep, spec_at

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def preset_names() -> list[str]:
    root = resources.files("mixerfirst.sweepcli") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def preset_path(name: str) -> Path:
    path = resources.files("mixerfirst.sweepcli") / "presets" / f"{name}.toml"
    if not path.is_file():
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {', '.join(preset_names())}")
    return Path(str(path))


def _load(args) -> SweepConfig:
    if args.preset:
        return load_config(preset_path(args.preset))
    if not args.config:
        raise ConfigError("--config", "give --config PATH or --preset NAME")
    return load_config(args.config)


def _formats(value: str) -> tuple:
    items = tuple(v.strip() for v in value.split(",") if v.strip())
    bad = [v for v in items if v not in FORMATS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"choose from {', '.join(FORMATS)}")
    return items


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mixerfirst", description="Mixer-first receiver design sweeps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--config", type=Path, help="TOML configuration file")
        src.add_argument("--preset", help="bundled configuration: " + ", ".join(preset_names()))
        sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
        return sp

    common(sub.add_parser("synth", help="synthesize matching networks and print element values"))
    sp = common(sub.add_parser("sweep", help="run a frequency sweep and write results"))
    sp.add_argument("--format", type=_formats, help="comma list of " + ",".join(FORMATS))
    sp.add_argument("--oracle", choices=ORACLE_MODES)
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp = common(sub.add_parser("simulate", help="time-domain steady state at one frequency"))
    sp.add_argument("--freq-ghz", type=float, help="LO frequency (default: first grid point)")
    sp.add_argument("--steps", type=int, default=1024, help="steps per LO period")
    common(sub.add_parser("calibrate", help="fit k_cal against the oracle over the grid"))
    sp = common(sub.add_parser("compare", help="LTI model against the oracle over the grid"))
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sub.add_parser("presets", help="list bundled configurations")
    return p


def cmd_synth(cfg: SweepConfig, args) -> int:
    report = {}
    for v in cfg.variants:
        spec, cal = prepare_variant(v)
        entry = {"architecture": spec.architecture.value, "k_cal": spec.k_cal}
        if spec.match is not None:
            entry["match"] = spec.match.to_dict()
        if cal is not None:
            entry["calibration_residual"] = cal.residual
        report[v.name] = entry
        print(f"{v.name}: {spec.architecture.value}, k_cal={spec.k_cal:.4g}")
        if spec.match is not None:
            for key, val in spec.match.to_dict().items():
                if key != "kind":
                    print(f"  {key} = {val:.6g}" if isinstance(val, float) else f"  {key} = {val}")
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "synth.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(cfg: SweepConfig, args) -> int:
    result = run_sweep(cfg, jobs=args.jobs, oracle=args.oracle)
    for path in emit(result, args.out, args.format or cfg.formats, cfg.stem):
        print(f"wrote {path}")
    print(result.summary())
    return EXIT_NUMERIC if result.failed else EXIT_OK


def cmd_simulate(cfg: SweepConfig, args) -> int:
    f = args.freq_ghz * 1e9 if args.freq_ghz else cfg.grid.points[0]
    args.out.mkdir(parents=True, exist_ok=True)
    for v in cfg.variants:
        spec, _ = prepare_variant(v)
        spec = spec_at(spec, f, cfg.lo_tracks_rf)
        net, lo = build_network(spec), lo_for(spec)
        f_rf = oracle_frequency(spec.f_lo, None if cfg.lo_tracks_rf else f)
        trace = simulate_pss(net, lo, f_rf, args.steps)
        z = measure_zin(trace)
        path = args.out / f"{cfg.stem}_{v.name}_trace.csv"
        trace.to_csv(path)
        print(
            f"{v.name}: f_lo={spec.f_lo / 1e9:g} GHz f_rf={f_rf / 1e9:.6g} GHz "
            f"z_in={z.real:.3f}{z.imag:+.3f}j ohm gain={measure_conversion_gain(trace):.3f} dB "
            f"vds/vs={measure_vds_peak(trace, net, lo):.4f} periods={trace.periods}"
        )
        print(f"wrote {path}")
    return EXIT_OK


def cmd_calibrate(cfg: SweepConfig, args) -> int:
    report = {}
    for v in cfg.variants:
        spec, _ = prepare_variant(v)
        cal = calibrate_r_ol(spec, cfg.grid)
        print(f"{v.name}: k_cal={cal.k_cal:.6g} residual={cal.residual:.2%}")
        for p, z, g in zip(cal.points, cal.lti_z_in, cal.lti_gain_db):
            print(
                f"  {p.f_lo / 1e9:8.3f} GHz  oracle z_in={p.z_in.real:8.3f}{p.z_in.imag:+8.3f}j "
                f"gain={p.gain_db:7.3f} dB | lti z_in={z.real:8.3f}{z.imag:+8.3f}j gain={g:7.3f} dB"
            )
        report[v.name] = {"k_cal": cal.k_cal, "residual": cal.residual, "freqs_ghz": list(cfg.grid.ghz)}
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "calibration.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_compare(cfg: SweepConfig, args) -> int:
    result = run_sweep(cfg, jobs=args.jobs, oracle="verify")
    worst = 0.0
    for s in result.series:
        print(f"{s.name}:")
        print("  freq_ghz   dzin_rel   dgain_db")
        for r in s.rows:
            if r["error"]:
                print(f"  {r['freq_ghz']:8.3f}   {r['error']}")
                continue
            worst = max(worst, r["dzin_rel"])
            flag = "" if r["dzin_rel"] <= VERIFY_ZIN_TOL else "  exceeds tolerance"
            print(f"  {r['freq_ghz']:8.3f}   {r['dzin_rel']:8.4f}   {r['dgain_db']:+8.4f}{flag}")
    for path in emit(result, args.out, ("csv", "json"), f"{cfg.stem}_compare"):
        print(f"wrote {path}")
    print(f"worst |dz_in|/|z_in| = {worst:.4f} (tolerance {VERIFY_ZIN_TOL})")
    return EXIT_NUMERIC if result.failed else EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name in preset_names():
            print(name)
        return EXIT_OK
    try:
        cfg = _load(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, SynthesisError, CalibrationError, NetworkError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (EmitError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
