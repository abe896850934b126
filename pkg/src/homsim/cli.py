"""Command-line front end.

Subcommands::

    homsim simulate EXPERIMENT [--out FILE]       noiseless expected curve
    homsim synth EXPERIMENT [--seed N] [--out]    Poisson-sampled counts
    homsim fit CURVE [--mc-trials N] [--seed N]   Gaussian-dip fit report
    homsim extract-dispersion CURVE --t0-fwhm PS --length M [...]
    homsim plot CURVE [--fit REPORT] [--out SVG]
    homsim presets [NAME] [--out FILE]            shipped example experiments

Machine-readable reports go to stdout (or --out); diagnostics go to stderr.
Exit codes: 0 success, 2 invalid input/schema, 3 physics error, 4 fit
non-convergence, 5 dip not found, 6 infeasible dip width.

The environment variable HOMSIM_OUTDIR sets the directory used for derived
output names when --out is not given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .config import dump_experiment, load_experiment
from .curvefile import read_curve, write_curve
from .errors import (
    ConfigError,
    DipNotFoundError,
    FitConvergenceError,
    GridMismatchError,
    GridTooNarrowError,
    HomsimError,
    InfeasibleWidthError,
    MonteCarloError,
)
from .experiment import expected_curve, sample_counts
from .fitting import dispersion_from_dip, monte_carlo_fit, pulse_width_from_dip
from .presets import preset_names, preset_text
from .units import fwhm_to_t0

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_PHYSICS = 3
EXIT_NO_CONVERGENCE = 4
EXIT_NO_DIP = 5
EXIT_INFEASIBLE = 6

FIT_REPORT_SCHEMA = "homsim-fit-v1"
DISPERSION_REPORT_SCHEMA = "homsim-dispersion-v1"


def _outdir() -> Path:
    return Path(os.environ.get("HOMSIM_OUTDIR", "."))


def _default_out(stem: str, suffix: str) -> Path:
    return _outdir() / f"{stem}{suffix}"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_simulate(args: argparse.Namespace) -> int:
    normalized, config = load_experiment(args.experiment)
    curve = expected_curve(config)
    curve.metadata.update({"schema": "homsim-curve-v1", "experiment": normalized})
    out = Path(args.out) if args.out else _default_out(Path(args.experiment).stem, ".curve.txt")
    write_curve(curve, out)
    print(f"wrote {curve.n_points}-point expected curve to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    normalized, config = load_experiment(args.experiment)
    curve = expected_curve(config)
    seed = args.seed if args.seed is not None else config.rng_seed
    sampled = sample_counts(curve, seed=seed)
    sampled.metadata.update({"schema": "homsim-curve-v1", "experiment": normalized})
    out = Path(args.out) if args.out else _default_out(Path(args.experiment).stem, ".synth.txt")
    write_curve(sampled, out)
    print(
        f"wrote sampled curve (seed {sampled.metadata['seed']}) to {out}",
        file=sys.stderr,
    )
    return EXIT_OK


def _fit_report(curve_path: str, args_mc_trials: int, seed: Optional[int]) -> dict:
    curve = read_curve(curve_path)
    if seed is None:
        recorded = curve.metadata.get("seed")
        seed = recorded if isinstance(recorded, int) else None
    result = monte_carlo_fit(curve, trials=args_mc_trials, seed=seed)
    return {
        "schema": FIT_REPORT_SCHEMA,
        "curve_file": Path(curve_path).name,
        "baseline_counts": result.baseline,
        "baseline_sigma": result.baseline_sigma,
        "visibility": result.visibility,
        "visibility_sigma": result.visibility_sigma,
        "center_ps": result.center,
        "center_sigma_ps": result.center_sigma,
        "dip_fwhm_ps": result.fwhm,
        "dip_fwhm_sigma_ps": result.fwhm_sigma,
        "pulse_fwhm_ps": pulse_width_from_dip(result.fwhm),
        "pulse_fwhm_sigma_ps": result.fwhm_sigma / 2.0**0.5,
        "mc_trials": result.n_mc_trials,
        "mc_failures": result.mc_failures,
        "mc_degenerate": result.mc_degenerate,
        "mc_seed": seed,
        "iterations": result.iterations,
        "residual_norm": result.residual_norm,
    }


def _format_fit_text(report: dict) -> str:
    lines = [
        f"curve          : {report['curve_file']}",
        f"baseline       : {report['baseline_counts']:.6g} +- {report['baseline_sigma']:.3g} counts",
        f"visibility     : {report['visibility']:.6g} +- {report['visibility_sigma']:.3g}",
        f"dip center     : {report['center_ps']:.6g} +- {report['center_sigma_ps']:.3g} ps",
        f"dip FWHM       : {report['dip_fwhm_ps']:.6g} +- {report['dip_fwhm_sigma_ps']:.3g} ps",
        f"pulse FWHM     : {report['pulse_fwhm_ps']:.6g} +- {report['pulse_fwhm_sigma_ps']:.3g} ps",
        f"MC trials      : {report['mc_trials']} ({report['mc_failures']} failed)"
        + (" [degenerate: no counts to resample]" if report["mc_degenerate"] else ""),
        f"iterations     : {report['iterations']}, residual norm {report['residual_norm']:.6g}",
    ]
    return "".join(line + "\n" for line in lines)


def cmd_fit(args: argparse.Namespace) -> int:
    report = _fit_report(args.curve, args.mc_trials, args.seed)
    text = _format_fit_text(report) if args.report == "text" else _json_dumps(report)
    _emit(text, args.out)
    return EXIT_OK


def cmd_extract_dispersion(args: argparse.Namespace) -> int:
    fit_report = _fit_report(args.curve, args.mc_trials, args.fit_seed)
    estimate = dispersion_from_dip(
        fwhm_d=fit_report["dip_fwhm_ps"],
        t0=fwhm_to_t0(args.t0_fwhm),
        length=args.length,
        wavelength=args.wavelength,
        fwhm_d_sigma=fit_report["dip_fwhm_sigma_ps"],
        t0_sigma=fwhm_to_t0(args.t0_fwhm_sigma),
        mc_trials=args.mc_trials_propagation,
        seed=args.seed if args.seed is not None else fit_report["mc_seed"],
    )
    report = {
        "schema": DISPERSION_REPORT_SCHEMA,
        "alpha_ps2": estimate.alpha,
        "alpha_sigma_ps2": estimate.alpha_sigma,
        "beta2_ps2_per_km": estimate.beta2,
        "beta2_sigma_ps2_per_km": estimate.beta2_sigma,
        "dispersion_ps_per_nm_km": estimate.dispersion,
        "dispersion_sigma_ps_per_nm_km": estimate.dispersion_sigma,
        "dispersion_sigma_from_width": estimate.dispersion_sigma_from_width,
        "dispersion_sigma_from_t0": estimate.dispersion_sigma_from_t0,
        "near_boundary": estimate.near_boundary,
        "inputs": {
            "t0_fwhm_ps": args.t0_fwhm,
            "t0_fwhm_sigma_ps": args.t0_fwhm_sigma,
            "length_m": args.length,
            "wavelength_nm": args.wavelength,
            "propagation_mc_trials": estimate.n_mc_trials,
        },
        "fit": fit_report,
    }
    if args.report == "text":
        text = (
            f"alpha          : {estimate.alpha:.6g} +- {estimate.alpha_sigma:.3g} ps^2\n"
            f"beta2          : {estimate.beta2:.6g} +- {estimate.beta2_sigma:.3g} ps^2/km\n"
            f"dispersion D   : {estimate.dispersion:.6g} +- {estimate.dispersion_sigma:.3g} ps/(nm km)\n"
            f"  sigma split  : width {estimate.dispersion_sigma_from_width:.3g}, "
            f"pulse width {estimate.dispersion_sigma_from_t0:.3g}\n"
            f"near boundary  : {estimate.near_boundary}\n"
        )
    else:
        text = _json_dumps(report)
    _emit(text, args.out)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    from .plotting import plot_curve  # deferred: pulls in matplotlib

    curve = read_curve(args.curve)
    fit_report = None
    if args.fit:
        try:
            fit_report = json.loads(Path(args.fit).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read fit report {args.fit}: {exc}") from exc
        if fit_report.get("schema") != FIT_REPORT_SCHEMA:
            raise ConfigError(f"{args.fit}: not a {FIT_REPORT_SCHEMA} report")
    out = Path(args.out) if args.out else _default_out(Path(args.curve).stem, ".svg")
    plot_curve(curve, fit_report, out)
    print(f"wrote plot to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    if args.name is None:
        _emit("".join(name + "\n" for name in preset_names()), None)
        return EXIT_OK
    text = preset_text(args.name)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote preset {args.name} to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_normalize(args: argparse.Namespace) -> int:
    normalized, _ = load_experiment(args.experiment)
    _emit(dump_experiment(normalized), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homsim",
        description="HOM interference with dispersive manipulation: simulate, sample, fit, extract.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write the noiseless expected curve of an experiment")
    p.add_argument("experiment", help="experiment JSON file")
    p.add_argument("--out", help="output curve file (default: derived name in HOMSIM_OUTDIR)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth", help="simulate plus Poisson sampling of counts")
    p.add_argument("experiment")
    p.add_argument("--seed", type=int, help="sampling seed (default: scan.seed, else entropy)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="Monte-Carlo Gaussian-dip fit of a curve file")
    p.add_argument("curve")
    p.add_argument("--mc-trials", type=int, default=1000)
    p.add_argument("--seed", type=int, help="Monte-Carlo seed (default: curve seed)")
    p.add_argument("--report", choices=["json", "text"], default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser(
        "extract-dispersion",
        help="second-order dispersion of the unbalanced element from a curve file",
    )
    p.add_argument("curve")
    p.add_argument("--t0-fwhm", type=float, required=True,
                   help="source pulse intensity FWHM in ps")
    p.add_argument("--t0-fwhm-sigma", type=float, default=0.0,
                   help="1-sigma uncertainty of the pulse FWHM in ps")
    p.add_argument("--length", type=float, required=True,
                   help="length of the unbalanced element in m")
    p.add_argument("--wavelength", type=float, default=1565.0)
    p.add_argument("--mc-trials", type=int, default=1000, help="fit Monte-Carlo trials")
    p.add_argument("--mc-trials-propagation", type=int, default=10000,
                   help="resamples for the (d, T0) error propagation")
    p.add_argument("--fit-seed", type=int, help="Monte-Carlo fit seed (default: curve seed)")
    p.add_argument("--seed", type=int, help="error-propagation seed (default: fit seed)")
    p.add_argument("--report", choices=["json", "text"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract_dispersion)

    p = sub.add_parser("plot", help="render a curve file (and optional fit) to SVG")
    p.add_argument("curve")
    p.add_argument("--fit", help="fit report JSON to overlay")
    p.add_argument("--out", help="output SVG path")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("presets", help="list shipped example experiments or print one")
    p.add_argument("name", nargs="?", help="preset name; omit to list")
    p.add_argument("--out", help="write the preset JSON here")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("normalize", help="validate an experiment file and print its canonical form")
    p.add_argument("experiment")
    p.add_argument("--out")
    p.set_defaults(func=cmd_normalize)

    return parser


_EXIT_CODE_BY_ERROR = [
    (InfeasibleWidthError, EXIT_INFEASIBLE),
    (DipNotFoundError, EXIT_NO_DIP),
    ((FitConvergenceError, MonteCarloError), EXIT_NO_CONVERGENCE),
    ((GridTooNarrowError, GridMismatchError), EXIT_PHYSICS),
    (ConfigError, EXIT_SCHEMA),
]


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HomsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for types, code in _EXIT_CODE_BY_ERROR:
            if isinstance(exc, types):
                return code
        return EXIT_SCHEMA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
