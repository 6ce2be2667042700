"""Command-line interface: ``hiercomm detect`` and ``hiercomm scaling``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .exceptions import (DegenerateGraphError, EdgeListParseError, EmptyGraphError,
                         InsufficientDataError)
from .report import DetectionReport, run_pipeline, timing_scaling_report

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 3
EXIT_DEGENERATE = 4
EXIT_SUSPECT = 5


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hiercomm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="detect hierarchical overlapping communities")
    d.add_argument("--input", required=True, help="edge-list file (.gz ok); relative paths "
                   "also resolve against $HIERCOMM_DATA_DIR")
    d.add_argument("--name", help="network name in the report (default: file stem)")
    d.add_argument("--centrality", choices=("degree", "eigenvector"), default="degree")
    d.add_argument("--tmax", type=_positive_int, default=None, help="propagation step cap")
    d.add_argument("--falsify", action="store_true", help="compare against matched ER nulls")
    d.add_argument("--replicates", type=_positive_int, default=10)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--strict", action="store_true",
                   help=f"exit with {EXIT_SUSPECT} when the falsifiability verdict is 'suspect'")
    d.add_argument("--out", help="write the JSON report here (default: stdout)")
    d.add_argument("--curves", help="write per-level curves as CSV")
    d.add_argument("--timing", help="write per-step propagation timing as CSV")
    d.add_argument("--normalize-timing", action="store_true")
    d.add_argument("--workers", type=_positive_int, default=1)
    d.add_argument("--overlap-steps", action="store_true",
                   help="compute hub distances concurrently with propagation")

    s = sub.add_parser("scaling", help="fit log(runtime) against log(edges) over reports")
    s.add_argument("reports", nargs="+", help="JSON reports written by 'detect'")
    return parser


def _detect(args) -> int:
    try:
        report = run_pipeline(
            args.input, name=args.name, centrality=args.centrality, t_max=args.tmax,
            falsify=args.falsify, replicates=args.replicates, seed=args.seed,
            workers=args.workers, overlap_steps=args.overlap_steps,
            out=args.out, curves=args.curves)
    except EdgeListParseError as exc:
        print(f"hiercomm: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (EmptyGraphError, DegenerateGraphError) as exc:
        print(f"hiercomm: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"hiercomm: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.timing:
        report.write_timing_csv(args.timing, normalized=args.normalize_timing)
    if args.out is None:
        print(report.to_json())
    verdict = (report.falsifiability or {}).get("verdict")
    if verdict:
        print(f"hiercomm: falsifiability verdict: {verdict}", file=sys.stderr)
    if args.strict and verdict == "suspect":
        return EXIT_SUSPECT
    return EXIT_OK


def _scaling(args) -> int:
    reports = [DetectionReport.from_json(p) for p in args.reports]
    try:
        summary = timing_scaling_report(reports)
    except InsufficientDataError as exc:
        print(f"hiercomm: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(json.dumps(summary.__dict__, indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "detect":
        return _detect(args)
    return _scaling(args)


if __name__ == "__main__":
    sys.exit(main())
