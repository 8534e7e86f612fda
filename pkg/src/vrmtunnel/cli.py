"""Command-line entry point: ``vrmtunnel {sweep,table,check,dump-config}``.

Exit codes: 0 when every graded value is within tolerance, 1 when any is
not, 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import CATALOG, default_config_text, load_config
from .errors import ConfigError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _tolerance(text):
    value = float(text)
    if not value >= 1e-12:
        raise argparse.ArgumentTypeError("must be >= 1e-12")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vrmtunnel", description="Variational R-matrix tunneling calculations.")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run an energy sweep described by a configuration file")
    sweep.add_argument("config", help="path to an INI configuration")
    sweep.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=None,
                       help="add reference-integration columns (default: from the config)")
    sweep.add_argument("--tol", type=_tolerance, help="reference-integration tolerance")
    sweep.add_argument("--out", help="output directory (default: from the config)")
    sweep.add_argument("--workers", type=_positive_int, default=1)

    table = sub.add_parser("table", help="reproduce one published table")
    table.add_argument("id", choices=("table1", "table2", "table3", "figure-claims"))
    table.add_argument("--tol", type=_tolerance, help="reference-integration tolerance")
    table.add_argument("--workers", type=_positive_int, default=1)

    check = sub.add_parser("check", help="run the acceptance suite")
    check.add_argument("--workers", type=_positive_int, default=1)
    check.add_argument("--criterion", type=int, action="append", choices=range(1, 10),
                       help="run only this criterion (repeatable)")
    check.add_argument("-v", "--verbose", action="store_true", help="print every check")

    dump = sub.add_parser("dump-config", help="print the default configuration of a profile family")
    dump.add_argument("profile", choices=CATALOG + ("linear_table1",))
    return parser


def _sweep(args):
    from .harness import export_series, run_sweep, sweep_summary

    cfg = load_config(args.config)
    if args.tol is not None:
        cfg = cfg.replace(oracle_tol=args.tol)
    oracle = cfg.oracle if args.oracle is None else args.oracle
    rows = run_sweep(cfg, workers=args.workers, oracle=oracle)
    out = args.out or cfg.out_dir
    if not os.path.isabs(out) and args.out is None:
        out = os.path.join(os.path.dirname(os.path.abspath(args.config)), out)
    paths = export_series(rows, out, cfg.name, oracle=oracle)
    print(sweep_summary(rows))
    for p in paths:
        print(p)
    return EXIT_OK if all(r.ok for r in rows) else EXIT_FAIL


def _table(args):
    from .harness import reproduce_table

    report = reproduce_table(args.id, tol=args.tol, workers=args.workers)
    print(report.text())
    return EXIT_OK if report.passed else EXIT_FAIL


def _check(args):
    from .acceptance import run_criterion

    numbers = sorted(set(args.criterion or range(1, 10)))
    ok = True
    for n in numbers:
        result = run_criterion(n, workers=args.workers)
        print(result.text() if args.verbose else result.line(), flush=True)
        ok &= result.passed
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "dump-config":
            sys.stdout.write(default_config_text(args.profile))
            return EXIT_OK
        return {"sweep": _sweep, "table": _table, "check": _check}[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
