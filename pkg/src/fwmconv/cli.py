"""Command-line entry point: ``simulate``, ``fit`` and ``compare``.

Exit status: 0 on success, 1 for usage, config or input-format errors, 2 for
numerical failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .config import PRESETS, ConfigError, ScenarioConfig, dump_config, help_text, load_config, preset
from .pipeline import StageError, fit_record, run_scenario, write_outputs
from .profiles import (DegenerateProfileError, FitConvergenceError, RadialProfile,
                       compare_profiles, fit_airy, heuristic_guess)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def cmd_simulate(args) -> int:
    if args.dump_preset:
        try:
            text = dump_config(preset(args.dump_preset))
        except ConfigError as exc:
            _err(str(exc))
            return EXIT_USAGE
        if args.config:
            Path(args.config).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if not args.config:
        _err("simulate needs a config file (or --dump-preset NAME)")
        return EXIT_USAGE
    try:
        cfg = ScenarioConfig.from_values(load_config(args.config))
    except (ConfigError, ValueError) as exc:
        _err(f"invalid config {args.config}: {exc}")
        return EXIT_USAGE
    out = Path(args.out) if args.out else Path(args.config).with_suffix("").with_name(
        Path(args.config).stem + "_out")
    try:
        res = run_scenario(cfg)
    except StageError as exc:
        _err(str(exc))
        return EXIT_NUMERIC
    manifest = write_outputs(res, out)
    print(f"wrote {manifest}")
    return EXIT_OK


def _load_profile(path) -> RadialProfile:
    return io.read_profile_csv(path)


def cmd_fit(args) -> int:
    try:
        prof = _load_profile(args.csv)
    except (OSError, ValueError) as exc:
        _err(f"cannot read profile: {exc}")
        return EXIT_USAGE
    out = Path(args.out) if args.out else Path(args.csv).with_suffix(".fit.txt")
    status = EXIT_OK
    try:
        guess = heuristic_guess(prof, args.eps0)
        fit = fit_airy(prof, guess, offset=args.offset)
        converged = True
    except DegenerateProfileError as exc:
        _err(f"degenerate profile: {exc}")
        return EXIT_NUMERIC
    except FitConvergenceError as exc:
        _err(str(exc))
        fit, converged, status = exc.best, False, EXIT_NUMERIC
    io.write_record(fit_record(fit, converged), out)
    print(f"eps_ratio = {fit.eps_ratio!r}")
    print(f"residual = {fit.residual!r}")
    return status


def _rescaled(prof: RadialProfile, scale: float | None) -> RadialProfile:
    if scale is None:
        return prof
    return RadialProfile(prof.positions * scale, prof.intensities, unit="um")


def cmd_compare(args) -> int:
    try:
        a = _rescaled(_load_profile(args.csv_a), args.scale_a)
        b = _rescaled(_load_profile(args.csv_b), args.scale_b)
    except (OSError, ValueError) as exc:
        _err(f"cannot read profile: {exc}")
        return EXIT_USAGE
    try:
        cmp = compare_profiles(a, b)
    except DegenerateProfileError as exc:
        _err(str(exc))
        return EXIT_NUMERIC
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE
    rec = {"nrmse": cmp.nrmse, "peak_offset": cmp.peak_offset, "unit": cmp.unit}
    for i, w in enumerate(cmp.warnings):
        rec[f"warning.{i}"] = w
        print(f"warning: {w}", file=sys.stderr)
    text = io.write_record(rec, args.out)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fwmconv",
        description="Annular-aperture and four-wave-mixing mode-conversion simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser(
        "simulate",
        help="run a scenario config",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Run the configured pipeline and write PGM images, slice CSVs, fit records "
                    "and a manifest.",
        epilog="presets: " + ", ".join(PRESETS) + "\n\nconfig keys (section.key = value):\n"
               + help_text(),
    )
    sim.add_argument("config", nargs="?", help="config file (with --dump-preset: file to write)")
    sim.add_argument("--out", help="output directory (default: <config stem>_out)")
    sim.add_argument("--dump-preset", metavar="NAME", help="write preset NAME as a config and exit")
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", help="fit the annular Airy law to a profile CSV")
    fit.add_argument("csv")
    fit.add_argument("--eps0", type=float, default=0.5, help="initial obscuration ratio")
    fit.add_argument("--offset", action="store_true", help="also fit an additive background")
    fit.add_argument("--out", help="fit record path (default: <csv>.fit.txt)")
    fit.set_defaults(func=cmd_fit)

    cmp = sub.add_parser("compare", help="compare two profile CSVs")
    cmp.add_argument("csv_a")
    cmp.add_argument("csv_b")
    cmp.add_argument("--scale-a", type=float, help="um per position unit of A (e.g. pixel pitch)")
    cmp.add_argument("--scale-b", type=float, help="um per position unit of B")
    cmp.add_argument("--out", help="also write the metrics record here")
    cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "eps0", None) is not None and not 0 <= args.eps0 < 1:
        _err("--eps0 must lie in [0, 1)")
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
