#!/usr/bin/env python
"""Main entry point for the subtour-routing command line."""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from subtour_routing.cli.app import SubtourRoutingCli
from subtour_routing.config import config
from subtour_routing.utils import setup_logging

def positive_float(text: str) -> float:
    """argparse type for strictly positive reals."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value

def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="subtour-routing",
        description="Deadline-constrained delivery with subtours: feasibility, bounds and approximation"
    )
    parser.add_argument(
        "--log-level",
        help="Logging level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=config.log_level
    )
    parser.add_argument("--log-file", help="Write logs to this file instead of stderr")
    parser.add_argument(
        "--tolerance",
        help="Relative tolerance for guarantee checks",
        type=positive_float,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="Decide whether the deadline can be met")
    check.add_argument("instance", help="Instance JSON file")

    solve = commands.add_parser("solve", help="Run the approximation pipeline")
    solve.add_argument("instance", help="Instance JSON file")
    solve.add_argument("--epsilon", type=positive_float, default=None,
                       help="Trade-off parameter (default from SUBTOUR_EPSILON)")
    solve.add_argument("--slack", type=positive_float, default=None,
                       help="Target delay slack; sets epsilon = slack / 4")
    solve.add_argument("--out", help="Write the schedule JSON here")
    solve.add_argument("--dot", help="Write a DOT rendering of the schedule here")

    evaluate = commands.add_parser("eval", help="Validate and evaluate a schedule file")
    evaluate.add_argument("instance", help="Instance JSON file")
    evaluate.add_argument("schedule", help="Schedule JSON file")
    evaluate.add_argument("--deadline-factor", type=positive_float, default=1.0,
                          help="Accept delays up to this multiple of the deadline")

    bounds = commands.add_parser("bounds", help="Print lower bounds")
    bounds.add_argument("instance", help="Instance JSON file")

    oracle = commands.add_parser("oracle", help="Exhaustive reference search (small instances)")
    oracle.add_argument("instance", help="Instance JSON file")
    oracle.add_argument("--objective", choices=["delay", "cost", "subset"], default="delay")

    gen = commands.add_parser("gen", help="Generate an instance")
    gen.add_argument("family",
                     choices=["figure1", "tight", "steiner", "random_euclidean", "random_explicit"])
    gen.add_argument("--k", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--epsilon", type=positive_float)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--box", type=positive_float)
    gen.add_argument("--delta", type=float)
    gen.add_argument("--sigma", type=float)
    gen.add_argument("--slack", type=positive_float)
    gen.add_argument("--deadline", type=positive_float)
    gen.add_argument("--extra-points", dest="extra_points", type=int)
    gen.add_argument("--out", help="Write the instance here instead of stdout")
    gen.add_argument("--schedule-out", help="figure1 only: write the drawn schedule here")

    bench = commands.add_parser("bench", help="Benchmark the pipeline over a corpus")
    bench.add_argument("corpus", nargs="?", help="Directory of instance or generator JSON files")
    bench.add_argument("--random", type=int, help="Use N seeded random Euclidean instances")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--max-items", dest="max_items", type=int, default=12)
    bench.add_argument("--epsilons", type=positive_float, nargs="+",
                       default=[0.25, 0.5, 1.0, 2.0])
    bench.add_argument("--workers", type=int, default=None)
    bench.add_argument("--csv", help="Write the run table as CSV")
    bench.add_argument("--json", help="Write records and summary as JSON")
    bench.add_argument("--db", help="Also store runs in this SQLite database")
    return parser

def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    return build_parser().parse_args(argv)

def update_config(args: argparse.Namespace) -> None:
    """Update the global config with command line arguments."""
    if args.tolerance is not None:
        config.tolerance = args.tolerance
    if getattr(args, "db", None):
        config.results_db_path = Path(args.db)
    if getattr(args, "workers", None) is not None:
        config.bench_workers = args.workers
    config.log_level = args.log_level

def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit status."""
    args = parse_args(argv)
    update_config(args)
    setup_logging(args.log_level, args.log_file)
    logger = logging.getLogger(__name__)
    logger.debug(f"Running command {args.command}")
    return SubtourRoutingCli().run(args)

if __name__ == "__main__":
    sys.exit(main())
