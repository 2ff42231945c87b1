#!/usr/bin/env python3
"""Command-line entry point: estimate, bandwidth, study, sample, curve.

Exit codes: 0 on success, 2 for bad input (unreadable or invalid samples,
flags, configs), 1 for numerical or generation failures.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

# Import modular components
from modules.bandwidth_report import add_bandwidth_report_arguments, cmd_bandwidth
from modules.curve_export import add_curve_arguments, cmd_curve
from modules.estimation import add_estimate_arguments, cmd_estimate
from modules.sample_generation import add_sample_arguments, cmd_sample
from modules.study_runner import add_study_arguments, cmd_study

logger = logging.getLogger("gamma_kde")

COMMANDS = {
    "estimate": (add_estimate_arguments, cmd_estimate,
                 "density or derivative estimate of a sample file"),
    "bandwidth": (add_bandwidth_report_arguments, cmd_bandwidth,
                  "rule-of-thumb bandwidth report for a sample file"),
    "study": (add_study_arguments, cmd_study, "replication study error table"),
    "sample": (add_sample_arguments, cmd_sample, "generate i.i.d., MH or AR(1) samples"),
    "curve": (add_curve_arguments, cmd_curve, "estimate vs reference curve for plotting"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamma-kde",
        description="Gamma-kernel estimation of densities and density derivatives on [0, inf).",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name, (add_arguments, handler, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        add_arguments(p)
        p.set_defaults(handler=handler)
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except RuntimeError as e:
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
