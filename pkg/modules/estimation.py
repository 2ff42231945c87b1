"""
Estimate Module
Density or density-derivative estimate of a sample file on an evaluation grid.
"""
from __future__ import annotations

import argparse
import logging

from bandwidth import BandwidthLaw, select_bandwidth
from estimator import DEFAULT_GRID_POINTS, Estimand, EvalGrid, Sample, default_grid, estimate_values
from export_utils import write_estimate_csv
from modules.cli_utils import echo, output_stream
from sample_parser import parse_sample_file

logger = logging.getLogger(__name__)


def add_bandwidth_arguments(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--bandwidth", type=float, metavar="B",
                       help="fixed bandwidth (overrides the rule of thumb)")
    group.add_argument("--rule-of-thumb", action="store_true",
                       help="gamma-reference rule-of-thumb bandwidth (default)")
    p.add_argument("--pdf-law", action="store_true",
                   help="scale the rule of thumb with n^(-2/5) instead of n^(-2/7)")


def add_grid_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS)
    p.add_argument("--lower", type=float, help="grid lower cut (default max(1e-3, min/2))")
    p.add_argument("--upper", type=float, help="grid upper cut (default 0.999 sample quantile)")


def add_estimand_arguments(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--derivative", dest="which", action="store_const", const=Estimand.DERIVATIVE)
    group.add_argument("--density", dest="which", action="store_const", const=Estimand.DENSITY)
    p.set_defaults(which=Estimand.DERIVATIVE)


def add_estimate_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="sample file: one positive decimal per line, '#' comments")
    add_bandwidth_arguments(p)
    add_grid_arguments(p)
    add_estimand_arguments(p)
    p.add_argument("--output", "-o", help="CSV path (default stdout)")


def resolve_bandwidth(args: argparse.Namespace, s: Sample) -> float:
    if args.bandwidth is not None:
        return args.bandwidth
    law = BandwidthLaw.PDF if args.pdf_law else BandwidthLaw.DERIVATIVE
    return select_bandwidth(s, law).value


def resolve_grid(args: argparse.Namespace, s: Sample) -> EvalGrid:
    if args.lower is None and args.upper is None:
        return default_grid(s, args.grid_points)
    base = default_grid(s, args.grid_points)
    lower = base.lower_cut if args.lower is None else args.lower
    upper = base.upper_cut if args.upper is None else args.upper
    return EvalGrid.linspace(lower, upper, args.grid_points)


def cmd_estimate(args: argparse.Namespace) -> int:
    parsed = parse_sample_file(args.input)
    s = parsed.sample
    logger.info("read %s observations from %s", parsed.meta["observations"], parsed.meta["source"])
    b = resolve_bandwidth(args, s)
    echo(f"bandwidth: {b:.10g}")
    g = resolve_grid(args, s)
    values = estimate_values(s, b, g, args.which)
    with output_stream(args.output) as out:
        write_estimate_csv(g.points, values, out)
    return 0
