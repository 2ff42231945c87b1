"""
Study Runner Module
Runs a replication study from a key=value config and writes the error table.
"""
from __future__ import annotations

import argparse
import logging

from errors import ConfigError
from export_utils import write_summary_csv
from modules.cli_utils import output_stream, seed_override
from simulation import parse_study_config, replication_study

logger = logging.getLogger(__name__)


def add_study_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="study config: key=value lines, '#' comments")
    p.add_argument("--seed", type=int, help="study seed (overrides the config and $GAMMA_KDE_SEED)")
    p.add_argument("--workers", type=int, help="process-pool size for replications")
    p.add_argument("--replications", type=int, help="replications per cell (the tables used 500)")
    p.add_argument("--output", "-o", help="CSV path (default stdout)")


def cmd_study(args: argparse.Namespace) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError("config", f"cannot read {args.config}: {e.strerror or e}") from e
    cfg = parse_study_config(
        text,
        seed=seed_override(args.seed),
        workers=args.workers,
        replications=args.replications,
    )
    logger.info("study: %d distribution(s) x %d size(s) x %d mode(s), %d replications, seed %d",
                len(cfg.distributions), len(cfg.sizes), len(cfg.modes), cfg.replications, cfg.seed)
    summaries = replication_study(cfg)
    with output_stream(args.output) as out:
        write_summary_csv(summaries, out)
    return 0
