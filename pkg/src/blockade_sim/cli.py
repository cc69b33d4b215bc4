"""Command-line front end: ``blockade-sim {sweep,preset,check}``.

Exit codes: 0 success, 1 validation failure, 2 I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError
from .selfcheck import run_checks
from .sweep import (
    PRESETS,
    default_jobs,
    emit,
    gnuplot_script,
    load_config,
    load_preset,
    run_sweep,
)

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2

log = logging.getLogger("blockade_sim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _add_output_args(p):
    p.add_argument("--out", required=True, help="output file")
    p.add_argument("--format", choices=("csv", "jsonl"), default=None,
                   help="output format (default: from the --out suffix, else csv)")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: $BLOCKADE_SIM_JOBS or 1)")
    p.add_argument("--n-max", type=int, default=None, help="Fock truncation")
    p.add_argument("--gnuplot", action="store_true",
                   help="also write a gnuplot script next to the output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blockade-sim",
                     description="Nonreciprocal photon blockade sweeps.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sweep = sub.add_parser("sweep", help="run a sweep from a config file")
    sweep.add_argument("--config", required=True)
    _add_output_args(sweep)

    preset = sub.add_parser("preset", help="reproduce a figure preset")
    preset.add_argument("name", choices=PRESETS)
    _add_output_args(preset)

    sub.add_parser("check", help="run the invariant self-test")
    return parser


def _run(cfg, args) -> int:
    if args.n_max is not None:
        cfg = cfg.replace(n_max=args.n_max)
    fmt = args.format or ("jsonl" if Path(args.out).suffix in (".jsonl", ".json") else "csv")
    jobs = args.jobs if args.jobs is not None else default_jobs()
    records = run_sweep(cfg, jobs=jobs)
    emit(records, fmt, args.out)
    if args.gnuplot:
        Path(args.out).with_suffix(".gp").write_text(gnuplot_script(cfg, args.out))
    failed = sum(1 for r in records if r.error)
    log.info("wrote %d records to %s (%d flagged)", len(records), args.out, failed)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "check":
            return EXIT_OK if run_checks() else EXIT_INVALID
        if args.command == "sweep":
            cfg = load_config(args.config)
        else:
            cfg = load_preset(args.name)
        return _run(cfg, args)
    except ConfigError as exc:
        print(f"blockade-sim: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"blockade-sim: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
