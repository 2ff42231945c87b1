"""
Curve Export Module
Plot-ready CSV of an estimate against its reference curve: the true pdf (or
derivative) of a reference distribution, or a long-run histogram for AR(1)
chains.
"""
from __future__ import annotations

import argparse

from bandwidth import BandwidthLaw
from distributions import parse_distribution, sample
from export_utils import write_curve_csv
from modules.cli_utils import echo, output_stream, resolve_seed
from modules.estimation import (
    add_bandwidth_arguments,
    add_estimand_arguments,
    add_grid_arguments,
    resolve_bandwidth,
    resolve_grid,
)
from modules.sample_generation import add_generator_arguments, ar1_config, mh_config
from sample_parser import parse_sample_file
from simulation import REFERENCE_RUN, ar1_overlay, curve_for_distribution, mh_chain


def add_curve_arguments(p: argparse.ArgumentParser) -> None:
    add_generator_arguments(p, required=False)
    p.add_argument("--input", help="sample file to estimate from instead of generating (with --dist)")
    p.add_argument("--long-run", type=int, default=REFERENCE_RUN,
                   help="AR(1) reference histogram length")
    add_bandwidth_arguments(p)
    add_grid_arguments(p)
    add_estimand_arguments(p)
    p.add_argument("--output", "-o", help="CSV path (default stdout)")


def cmd_curve(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    if not (args.dist or args.mh or args.ar1):
        raise ValueError("curve needs one of --dist, --mh or --ar1")
    if args.input is None and args.n is None:
        raise ValueError("curve needs --n (or --input with --dist)")

    if args.ar1:
        law = BandwidthLaw.PDF if args.pdf_law else BandwidthLaw.DERIVATIVE
        curve = ar1_overlay(ar1_config(args.ar1, seed), args.n, long_run=args.long_run, law=law,
                            grid_points=args.grid_points, which=args.which, bandwidth=args.bandwidth)
    else:
        if args.mh:
            cfg = mh_config(args.mh, seed)
            dist, s = cfg.target, mh_chain(cfg, args.n)
        else:
            dist = parse_distribution(args.dist, "--dist")
            s = parse_sample_file(args.input).sample if args.input else sample(dist, args.n, seed)
        b = resolve_bandwidth(args, s)
        curve = curve_for_distribution(dist, s, b, resolve_grid(args, s), args.which)
    echo(f"bandwidth: {curve.bandwidth:.10g}")
    with output_stream(args.output) as out:
        write_curve_csv(curve, out)
    return 0
