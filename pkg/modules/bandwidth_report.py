"""
Bandwidth Report Module
Prints the gamma reference fit, its density functionals and the bandwidth b0.
"""
from __future__ import annotations

import argparse

from bandwidth import ALPHA_FLOOR, fit_gamma_reference, functionals_of, optimal_bandwidth
from distributions import Gamma
from errors import DivergedFunctionalError
from modules.cli_utils import output_stream
from sample_parser import parse_sample_file


def add_bandwidth_report_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="sample file: one positive decimal per line, '#' comments")
    p.add_argument("--output", "-o", help="report path (default stdout)")


def cmd_bandwidth(args: argparse.Namespace) -> int:
    s = parse_sample_file(args.input).sample
    fit = fit_gamma_reference(s)
    try:
        fun = functionals_of(Gamma(fit.alpha, fit.beta))
    except DivergedFunctionalError as e:
        note = f"moment fit alpha={fit.alpha_moment:.10g}"
        if fit.clamped:
            note += f", clamped to {ALPHA_FLOOR:g}"
        raise DivergedFunctionalError(f"{e} ({note})") from e
    b = optimal_bandwidth(fun, s.n)

    lines = [
        f"n = {s.n}",
        f"alpha_hat = {fit.alpha:.10g}",
        f"beta_hat = {fit.beta:.10g}",
        f"I1 = {fun.I1:.10g}",
        f"I2 = {fun.I2:.10g}",
        f"T = {fun.T:.10g}",
        f"b0 = {b.value:.10g}",
    ]
    if fit.clamped:
        lines.append(f"# moment fit alpha={fit.alpha_moment:.10g} clamped to {ALPHA_FLOOR:g}")
    with output_stream(args.output) as out:
        out.write("\n".join(lines) + "\n")
    return 0
