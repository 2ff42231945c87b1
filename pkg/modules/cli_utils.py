"""Helpers shared by the subcommand modules: seeds, outputs, generator options."""
from __future__ import annotations

import os
import sys
from contextlib import contextmanager
from typing import Dict, Iterator, Optional, Sequence, TextIO

from errors import ConfigError
from simulation import DEFAULT_SEED

SEED_ENV = "GAMMA_KDE_SEED"


def env_seed() -> Optional[int]:
    raw = os.getenv(SEED_ENV)
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(SEED_ENV, f"expected an integer, got {raw!r}") from None


def seed_override(cli_seed: Optional[int]) -> Optional[int]:
    """--seed, else $GAMMA_KDE_SEED, else None."""
    return cli_seed if cli_seed is not None else env_seed()


def resolve_seed(cli_seed: Optional[int]) -> int:
    """--seed, else $GAMMA_KDE_SEED, else DEFAULT_SEED."""
    seed = seed_override(cli_seed)
    return DEFAULT_SEED if seed is None else seed


@contextmanager
def output_stream(path: Optional[str]) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f


def echo(message: str) -> None:
    """Human-readable note on stderr, kept apart from the CSV payload."""
    print(message, file=sys.stderr)


def parse_options(flag: str, tokens: Sequence[str], allowed: Sequence[str]) -> Dict[str, str]:
    """``key=value`` tokens of a generator flag such as ``--mh target=maxwell:2 step=0.8``."""
    options: Dict[str, str] = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        key = key.strip().lower()
        if not sep or not value.strip():
            raise ConfigError(f"{flag} {key}", f"expected key=value, got {token!r}")
        if key not in allowed:
            raise ConfigError(f"{flag} {key}", f"unknown option; expected one of {list(allowed)}")
        options[key] = value.strip()
    return options


def option_float(flag: str, options: Dict[str, str], key: str, default: Optional[float] = None) -> float:
    if key not in options:
        if default is None:
            raise ConfigError(f"{flag} {key}", "required option missing")
        return default
    try:
        return float(options[key])
    except ValueError:
        raise ConfigError(f"{flag} {key}", f"expected a number, got {options[key]!r}") from None


def option_int(flag: str, options: Dict[str, str], key: str, default: int) -> int:
    if key not in options:
        return default
    try:
        return int(options[key])
    except ValueError:
        raise ConfigError(f"{flag} {key}", f"expected an integer, got {options[key]!r}") from None


def require_option(flag: str, options: Dict[str, str], key: str) -> str:
    if key not in options:
        raise ConfigError(f"{flag} {key}", "required option missing")
    return options[key]
