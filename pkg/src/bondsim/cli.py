"""Command line entry point: ``bondsim run|sweep|figure|validate``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import report
from .config import load_config
from .errors import NumericalError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("bondsim")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default="out", help="directory for CSV and manifest files")
    common.add_argument("--grid-n", type=int, default=None, help="parabolic grid interval count")
    common.add_argument("--tau-end", type=float, default=None, help="parabolic end of scaled time")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="bondsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run one scenario config")
    p.add_argument("config")

    p = sub.add_parser("sweep", parents=[common], help="bonding map over compression ratio and speed")
    p.add_argument("config")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker processes (default: number of CPUs)")

    p = sub.add_parser("figure", parents=[common], help="emit the data behind one figure")
    p.add_argument("id", help=", ".join(report.FIGURES))
    p.add_argument("--x-min", type=float, default=None, help="fig6/7/8: first displacement sample, mm")
    p.add_argument("--x-max", type=float, default=None, help="fig6/7/8: last displacement sample, mm")
    p.add_argument("--samples", type=_positive_int, default=400, help="fig6/7/8: sample count")

    p = sub.add_parser("validate", help="parse and check a config without running it")
    p.add_argument("config")
    return parser


def _print_manifest(manifest: report.RunManifest) -> None:
    for path in manifest.outputs:
        print(path)
    for note in manifest.notes:
        print(f"note: {note}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            cfg = load_config(args.config)
            print(f"{args.config}: ok (model={cfg.model}{', sweep' if cfg.sweep else ''})")
        elif args.command == "run":
            _print_manifest(report.run_scenario(args.config, args.out_dir,
                                                grid_n=args.grid_n, tau_end=args.tau_end))
        elif args.command == "sweep":
            _print_manifest(report.run_sweep_config(args.config, args.out_dir, args.workers,
                                                    grid_n=args.grid_n, tau_end=args.tau_end))
        elif args.command == "figure":
            if args.id not in report.FIGURES:
                parser.error(f"unknown figure id {args.id!r}; valid ids: {', '.join(report.FIGURES)}")
            x_range = None
            if args.x_min is not None or args.x_max is not None:
                if args.x_min is None or args.x_max is None:
                    parser.error("--x-min and --x-max go together")
                x_range = (args.x_min, args.x_max)
            _print_manifest(report.emit_figure_data(args.id, args.out_dir, tau_end=args.tau_end,
                                                    grid_n=args.grid_n, x_range=x_range,
                                                    samples=args.samples))
    except ValidationError as exc:
        print(f"bondsim: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"bondsim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
