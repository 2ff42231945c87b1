"""
Sample Generation Module
Writes i.i.d., Metropolis-Hastings or AR(1) samples, one value per line.
"""
from __future__ import annotations

import argparse
import logging

from distributions import parse_distribution, sample
from estimator import Sample
from export_utils import write_values
from modules.cli_utils import option_float, option_int, output_stream, parse_options, require_option, resolve_seed
from simulation import AR1Config, MHConfig, ar1_chain, mh_chain

logger = logging.getLogger(__name__)

MH_OPTIONS = ("target", "step", "burn_in")
AR1_OPTIONS = ("rho", "noise", "burn_in")


def add_generator_arguments(p: argparse.ArgumentParser, required: bool = True) -> None:
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument("--dist", metavar="SPEC", help="i.i.d. draws, e.g. gamma:2.43,1")
    group.add_argument("--mh", nargs="+", metavar="KEY=VALUE",
                       help="Metropolis-Hastings chain: target=SPEC [step=S] [burn_in=1000]; step defaults to 2.5 sd(ln X) of the target")
    group.add_argument("--ar1", nargs="+", metavar="KEY=VALUE",
                       help="AR(1) chain: rho=R noise=SPEC [burn_in=1000]")
    p.add_argument("--n", type=int, required=required, help="number of values")
    p.add_argument("--seed", type=int, help="seed (default $GAMMA_KDE_SEED, then a fixed constant)")


def mh_config(tokens, seed: int) -> MHConfig:
    opts = parse_options("--mh", tokens, MH_OPTIONS)
    return MHConfig(
        target=parse_distribution(require_option("--mh", opts, "target"), "--mh target"),
        proposal_step=option_float("--mh", opts, "step") if "step" in opts else None,
        burn_in=option_int("--mh", opts, "burn_in", 1000),
        seed=seed,
    )


def ar1_config(tokens, seed: int) -> AR1Config:
    opts = parse_options("--ar1", tokens, AR1_OPTIONS)
    return AR1Config(
        rho_ar=option_float("--ar1", opts, "rho"),
        noise=parse_distribution(require_option("--ar1", opts, "noise"), "--ar1 noise"),
        burn_in=option_int("--ar1", opts, "burn_in", 1000),
        seed=seed,
    )


def generate_from_args(args: argparse.Namespace) -> Sample:
    seed = resolve_seed(args.seed)
    if args.mh:
        return mh_chain(mh_config(args.mh, seed), args.n)
    if args.ar1:
        return ar1_chain(ar1_config(args.ar1, seed), args.n)
    return sample(parse_distribution(args.dist, "--dist"), args.n, seed)


def add_sample_arguments(p: argparse.ArgumentParser) -> None:
    add_generator_arguments(p)
    p.add_argument("--output", "-o", help="output path (default stdout)")


def cmd_sample(args: argparse.Namespace) -> int:
    s = generate_from_args(args)
    if "acceptance_rate" in s.seed_info:
        logger.info("acceptance rate %.3f", s.seed_info["acceptance_rate"])
    with output_stream(args.output) as out:
        write_values(s.values, out)
    return 0
