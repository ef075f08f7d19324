"""Command-line front end.

Usage::

    qrheat sweep --config cfg.json --out results.csv [--workers K]
    qrheat sweep --preset fig2a --out fig2a.csv [--dump-overlaps]

Exit codes: 0 success, 1 configuration error, 2 sweep finished with failed
grid points, 3 fatal error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from .errors import ParseError, QrheatError, UnknownPreset, ValidationError
from .overlaps import cached_overlap_table
from .spectrum import build_branches, validate_params
from .sweep import emit_csv, figure_preset, parse_config, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2
EXIT_FATAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrheat",
        description="Steady-state heat transport in a quadratically coupled "
        "qubit-resonator system",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sweep = sub.add_parser("sweep", help="run a parameter sweep")
    sweep.add_argument("--config", type=Path, help="JSON sweep configuration")
    sweep.add_argument("--out", type=Path, required=True, help="output CSV path")
    sweep.add_argument(
        "--preset",
        help="figure preset name (fig2a, fig2b, fig2e, fig3, fig4a, fig4b, "
        "fig5a, fig5b); overrides --config",
    )
    sweep.add_argument(
        "--workers", type=int, help="process count (overrides the config)"
    )
    sweep.add_argument(
        "--dump-overlaps",
        action="store_true",
        help="also write the overlap-coefficient table for the base coupling",
    )
    return parser


def _dump_overlaps(cfg, destination: Path) -> None:
    params = validate_params(cfg.model)
    branches = build_branches(params)
    table = cached_overlap_table(branches, 1, cfg.truncation.initial_n)
    size = cfg.truncation.initial_n + 1
    lines = [",".join(f"{v:.17g}" for v in row) for row in table.entries[:size, :size]]
    path = destination.with_name(destination.stem + "_overlaps.csv")
    path.write_text("\n".join(lines) + "\n")
    print(f"overlap table ({size}x{size}) written to {path}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.preset:
                cfg = figure_preset(args.preset)
            elif args.config:
                cfg = parse_config(args.config.read_text())
            else:
                cfg = parse_config("")
            if args.workers is not None:
                cfg = replace(cfg, workers=max(1, args.workers))
        for warning in caught:
            print(f"warning: {warning.message}", file=sys.stderr)
    except (ParseError, ValidationError, UnknownPreset, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        records = run_sweep(cfg)
        emit_csv(records, args.out, cfg)
        if args.dump_overlaps:
            _dump_overlaps(cfg, args.out)
    except QrheatError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return EXIT_FATAL

    failed = sum(1 for record in records if record.error)
    print(
        f"{len(records)} grid points written to {args.out}"
        + (f", {failed} failed" if failed else "")
    )
    return EXIT_PARTIAL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
