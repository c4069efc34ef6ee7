"""Command-line interface.

Subcommands map one-to-one onto the package's main entry points:

    simulate     one pulse, both propagators, trajectory CSV
    scan         parameter sweep from a JSON config
    qsa-map      wavelength x duration map of the quasistatic error
    decompose    population / coherence source decomposition report
    buildup      coherence buildup time series for one or more wavelengths
    phase-match  odd-order phase-matching wavelengths
    cep          carrier-envelope-phase response of the coherence
    presets      print the built-in N2+ system block

Outputs contain no timestamps or RNG draws: the same configuration
always produces byte-identical files.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adiabatic import default_grid, sample_dynamics, semianalytic_evolve
from .analysis import (
    cep_response,
    decompose_coherence,
    decompose_population,
    diagnostics,
    phase_matching_wavelength,
    qsa_error,
)
from .pulse import InvalidPulseError, make_pulse
from .reference import solve_diabatic
from .sweep import (
    ConfigError,
    ScanAxis,
    ScanSpec,
    load_config,
    resolve_pulse,
    run_scan,
    spec_from_config,
    system_from_block,
    system_to_block,
)
from .trajectory import format_float, write_trajectory_csv
from .tunneling import n2_calibrated

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_POINT_FAILURES = 3


def _add_point_flags(parser: argparse.ArgumentParser, fwhm_default=None):
    parser.add_argument("--config", type=Path, help="JSON config; overrides built-in defaults")
    parser.add_argument("--wavelength", type=float, default=1030.0, metavar="NM")
    parser.add_argument("--intensity", type=float, default=2e14, metavar="W_CM2")
    parser.add_argument("--fwhm", type=float, default=fwhm_default, metavar="FS")
    parser.add_argument("--single-cycle", action="store_true", help="set FWHM to one optical period")
    parser.add_argument("--cep", type=float, default=0.0, metavar="RAD")
    parser.add_argument("--window-tau", type=float, default=3.0, help="half-window in FWHM units")
    parser.add_argument("--samples-per-cycle", type=int, default=200)


def _point_setup(args):
    """(system, pulse, grid_block) for a single-point subcommand."""
    system_block = system_to_block(n2_calibrated())
    pulse_block = {
        "wavelength_nm": args.wavelength,
        "intensity_Wcm2": args.intensity,
        "cep_rad": args.cep,
        "single_cycle": bool(args.single_cycle),
    }
    if args.fwhm is not None:
        pulse_block["fwhm_fs"] = args.fwhm
    grid_block = {"window_tau": args.window_tau, "samples_per_cycle": args.samples_per_cycle}
    if args.config:
        cfg = load_config(args.config)
        system_block = cfg.get("system", system_block)
        pulse_block = {**pulse_block, **cfg.get("pulse", {})}
        grid_block = {**grid_block, **cfg.get("grid", {})}
    if not pulse_block.get("single_cycle") and "fwhm_fs" not in pulse_block:
        raise InvalidPulseError("specify --fwhm or --single-cycle")
    system = system_from_block(system_block)
    pulse = resolve_pulse(pulse_block)
    grid = default_grid(
        system,
        pulse,
        window_tau=float(grid_block.get("window_tau", 3.0)),
        samples_per_cycle=int(grid_block.get("samples_per_cycle", 200)),
        n_samples=grid_block.get("n_samples"),
    )
    return system, pulse, grid


def _describe(pulse) -> str:
    return (
        f"{pulse.wavelength_nm:g} nm, {pulse.intensity_Wcm2:g} W/cm^2, "
        f"{pulse.fwhm_fs:g} fs FWHM, CEP {pulse.cep_rad:g} rad"
    )


def _cmd_simulate(args) -> int:
    system, pulse, grid = _point_setup(args)
    reference = solve_diabatic(system, pulse, grid)
    sem = semianalytic_evolve(system, pulse, grid)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_file = out_dir / "trajectory.csv"
    write_trajectory_csv(
        out_file,
        [reference, sem],
        comments=[f"ionwake simulate: {_describe(pulse)}"],
        stride=args.stride,
    )
    print(f"pulse: {_describe(pulse)}")
    print(f"rho0(t_f) = {reference.rho0[-1]:.6g}")
    print(f"rho22 reference = {reference.rho22_d[-1]:.6g}  semianalytic = {sem.rho22_a[-1]:.6g}")
    print(f"|rho21| reference = {abs(reference.rho21_d[-1]):.6g}  semianalytic = {abs(sem.rho21_a[-1]):.6g}")
    if reference.rho22_d[-1] > 0.0:
        err = qsa_error(system, pulse, grid, reference=reference, semianalytic=sem)
        print(f"qsa error = {err:+.3f} %")
    print(f"wrote {out_file}")
    return EXIT_OK


def _cmd_scan(args) -> int:
    cfg = load_config(args.config)
    spec = spec_from_config(cfg)
    if args.workers is not None:
        spec.workers = args.workers
    out_path = args.out if args.out is not None else spec.out_path
    if out_path is None:
        raise ConfigError("no output path: set output.path in the config or pass --out")
    table = run_scan(spec, out_path=out_path)
    print(f"wrote {out_path} ({len(table.rows)} rows)")
    if table.failures:
        print(f"{table.failures} point(s) failed; see the error column", file=sys.stderr)
        return EXIT_POINT_FAILURES
    return EXIT_OK


def _parse_range(text: str, name: str):
    try:
        lo, hi, count = text.split(":")
        return float(lo), float(hi), int(count)
    except ValueError:
        raise ConfigError(f"--{name} expects MIN:MAX:COUNT, got {text!r}")


def _cmd_qsa_map(args) -> int:
    lo_w, hi_w, n_w = _parse_range(args.wavelengths, "wavelengths")
    lo_f, hi_f, n_f = _parse_range(args.fwhms, "fwhms")
    spec = ScanSpec(
        system_block=system_to_block(n2_calibrated()),
        pulse_block={"intensity_Wcm2": args.intensity, "cep_rad": 0.0, "center_fs": 0.0, "single_cycle": False},
        axes=(ScanAxis("wavelength_nm", lo_w, hi_w, n_w), ScanAxis("fwhm_fs", lo_f, hi_f, n_f)),
        observables=("qsa_error_pct", "rho22", "gamma_e"),
        workers=args.workers or 1,
    )
    table = run_scan(spec, out_path=args.out)
    print(f"wrote {args.out} ({len(table.rows)} rows)")
    return EXIT_POINT_FAILURES if table.failures else EXIT_OK


def _cmd_decompose(args) -> int:
    system, pulse, grid = _point_setup(args)
    dyn = sample_dynamics(system, pulse, grid)
    pop = decompose_population(system, pulse, dynamics=dyn)
    coh = decompose_coherence(system, pulse, dynamics=dyn)
    diag = diagnostics(system, pulse)
    report = {
        "pulse": {
            "wavelength_nm": pulse.wavelength_nm,
            "intensity_Wcm2": pulse.intensity_Wcm2,
            "fwhm_fs": pulse.fwhm_fs,
            "cep_rad": pulse.cep_rad,
        },
        "population": {
            "frac_shakeup": pop.shake_up,
            "frac_direct": pop.direct,
            "frac_tic": pop.tic_transfer,
            "rho22_final": pop.total,
        },
        "coherence": {
            "abs_ti_driven": abs(coh.ti_driven),
            "abs_tic_driven": abs(coh.tic_driven),
            "ti_over_tic": coh.ratio,
        },
        "diagnostics": {"gamma_e": diag.gamma_e, "keldysh": diag.keldysh},
    }
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.json}")
    else:
        print(f"pulse: {_describe(pulse)}")
        print(
            "population fractions: shake-up {:.3f}, direct {:.3f}, tic {:.3f} (rho22 = {:.4g})".format(
                pop.shake_up, pop.direct, pop.tic_transfer, pop.total
            )
        )
        print(f"coherence |TI|/|TIC| = {coh.ratio:.3f}")
        print(f"gamma_e = {diag.gamma_e:.3f}, keldysh = {diag.keldysh:.3f}")
    return EXIT_OK


def _cmd_buildup(args) -> int:
    wavelengths = [float(w) for w in args.wavelength]
    trajectories = []
    for wl in wavelengths:
        pulse = make_pulse(wl, args.intensity, args.fwhm, args.cep, single_cycle=args.single_cycle)
        system = n2_calibrated()
        grid = default_grid(system, pulse, window_tau=args.window_tau, samples_per_cycle=args.samples_per_cycle)
        trajectories.append(semianalytic_evolve(system, pulse, grid))
    write_trajectory_csv(
        args.out,
        trajectories,
        comments=[
            "ionwake buildup series",
            f"intensity_Wcm2: {args.intensity:g}; fwhm_fs: "
            + ("single-cycle" if args.single_cycle else f"{args.fwhm:g}")
            + f"; cep_rad: {args.cep:g}",
        ],
        extra_columns={"wavelength_nm": wavelengths},
        stride=args.stride,
    )
    print(f"wrote {args.out} ({len(wavelengths)} wavelength(s))")
    return EXIT_OK


def _cmd_phase_match(args) -> int:
    system = n2_calibrated()
    orders = [int(n) for n in args.n]
    rows = []
    for n in orders:
        wl = phase_matching_wavelength(system, args.intensity, n)
        rows.append((n, wl))
        print(f"n = {n}: (2n+1) = {2 * n + 1}, lambda = {wl:.1f} nm")
    if args.out:
        with Path(args.out).open("w", newline="") as fh:
            fh.write(f"# ionwake phase-match, intensity_Wcm2 = {args.intensity:g}\n")
            fh.write("n,order,wavelength_nm\n")
            for n, wl in rows:
                fh.write(f"{n},{2 * n + 1},{format_float(wl)}\n")
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_cep(args) -> int:
    system, pulse, _ = _point_setup(args)
    resp = cep_response(system, pulse, n_cep=args.samples)
    print(f"pulse: {_describe(pulse)} (CEP scanned over {args.samples} values)")
    print(f"amplitude variation (max-min)/mean = {resp.amplitude_variation:.4f}")
    print(f"phase slope d(arg rho21)/d(CEP) = {resp.phase_slope:+.4f}")
    if args.out:
        with Path(args.out).open("w", newline="") as fh:
            fh.write(f"# ionwake cep response: {_describe(pulse)}\n")
            fh.write("cep_rad,abs_coh,arg_coh\n")
            for phi, c in zip(resp.cep, resp.coherence):
                fh.write(f"{format_float(phi)},{format_float(abs(c))},{format_float(np.angle(c))}\n")
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_presets(args) -> int:
    block = {
        "schema_version": 1,
        "system": system_to_block(n2_calibrated()),
        "pulse": {"wavelength_nm": 1030.0, "intensity_Wcm2": 2e14, "fwhm_fs": 30.0, "cep_rad": 0.0},
    }
    print(json.dumps(block, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionwake",
        description="Concurrent tunneling ionization and strong-field excitation of a two-level ion",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run both propagators for one pulse")
    _add_point_flags(p)
    p.add_argument("--out", default=".", help="output directory for trajectory.csv")
    p.add_argument("--stride", type=int, default=1, help="CSV row decimation")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("scan", help="run a parameter sweep from a JSON config")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="override output.path")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("qsa-map", help="wavelength x duration map of the quasistatic error")
    p.add_argument("--wavelengths", default="1000:3200:7", metavar="MIN:MAX:N")
    p.add_argument("--fwhms", default="4:30:5", metavar="MIN:MAX:N")
    p.add_argument("--intensity", type=float, default=2e14)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_qsa_map)

    p = sub.add_parser("decompose", help="source-term decomposition at one point")
    _add_point_flags(p)
    p.add_argument("--json", default=None, help="write the report as JSON instead of text")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("buildup", help="coherence buildup series")
    p.add_argument("--wavelength", action="append", required=True, metavar="NM")
    p.add_argument("--intensity", type=float, default=2e14)
    p.add_argument("--fwhm", type=float, default=None)
    p.add_argument("--single-cycle", action="store_true")
    p.add_argument("--cep", type=float, default=0.0)
    p.add_argument("--window-tau", type=float, default=3.0)
    p.add_argument("--samples-per-cycle", type=int, default=200)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_buildup)

    p = sub.add_parser("phase-match", help="odd-order phase-matching wavelengths")
    p.add_argument("--intensity", type=float, default=2e14)
    p.add_argument("--n", action="append", default=None, help="order n (repeatable; default 2 3 4)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_phase_match)

    p = sub.add_parser("cep", help="carrier-envelope-phase response")
    _add_point_flags(p)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_cep)

    p = sub.add_parser("presets", help="print the built-in N2+ config block")
    p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "phase-match" and args.n is None:
        args.n = [2, 3, 4]
    try:
        return args.func(args)
    except (ConfigError, InvalidPulseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
