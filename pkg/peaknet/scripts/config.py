"""
Run defaults, layered: built-ins, then an ini file, then PEAKNET_SEED.

Command-line flags are applied on top by the CLI.
"""

import configparser
import logging
import os
from dataclasses import dataclass, replace
from typing import Callable, Dict, Mapping, Optional, Tuple

from .errors import ParameterError
from .models import MAX_SEED

logger = logging.getLogger(__name__)

SEED_ENV = "PEAKNET_SEED"


@dataclass(frozen=True)
class Defaults:
    seed: int = 0
    workers: int = 1
    seeds: int = 1
    resolution: float = 1.0
    weighted: bool = True
    assortativity_tolerance: float = 0.1
    top_k: int = 5


Getter = Callable[[configparser.ConfigParser, str, str], object]

# (section, key) -> (Defaults field, reader)
INI_KEYS: Dict[Tuple[str, str], Tuple[str, Getter]] = {
    ("peaknet", "seed"): ("seed", configparser.ConfigParser.getint),
    ("peaknet", "workers"): ("workers", configparser.ConfigParser.getint),
    ("peaknet", "seeds"): ("seeds", configparser.ConfigParser.getint),
    ("louvain", "resolution"): ("resolution", configparser.ConfigParser.getfloat),
    ("louvain", "weighted"): ("weighted", configparser.ConfigParser.getboolean),
    ("dce", "assortativity_tolerance"): (
        "assortativity_tolerance",
        configparser.ConfigParser.getfloat,
    ),
    ("stats", "top_k"): ("top_k", configparser.ConfigParser.getint),
}


def parse_seed(value: str, source: str = SEED_ENV) -> int:
    """Parse a 64-bit unsigned seed."""
    try:
        seed = int(value.strip())
    except ValueError:
        raise ParameterError(f"{source}: seed must be an integer, got {value!r}") from None
    if not 0 <= seed < MAX_SEED:
        raise ParameterError(f"{source}: seed must be in [0, 2**64), got {seed}")
    return seed


def read_ini(path: str, defaults: Optional[Defaults] = None) -> Defaults:
    """
    Override defaults from an ini file.

    Args:
        path: Path to the ini file
        defaults: Values to start from

    Returns:
        Updated defaults

    Raises:
        ParameterError: If the file is missing, malformed or holds bad values
    """
    defaults = defaults or Defaults()
    if not os.path.exists(path):
        raise ParameterError(f"Config file not found: {path}")

    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ParameterError(f"{path}: {e}") from None

    overrides = {}
    for section in parser.sections():
        for key in parser.options(section):
            if (section, key) not in INI_KEYS:
                logger.warning(f"{path}: ignoring unknown setting [{section}] {key}")
                continue
            field, getter = INI_KEYS[(section, key)]
            try:
                overrides[field] = getter(parser, section, key)
            except ValueError as e:
                raise ParameterError(f"{path}: [{section}] {key}: {e}") from None

    if "seed" in overrides:
        overrides["seed"] = parse_seed(str(overrides["seed"]), source=path)
    logger.debug(f"Config {path} overrides {sorted(overrides)}")
    return replace(defaults, **overrides)


def load_defaults(
    config_path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None
) -> Defaults:
    """
    Built-in defaults, overridden by the ini file and then by PEAKNET_SEED.

    Args:
        config_path: Optional ini file
        environ: Environment to read (default: os.environ)

    Returns:
        Effective defaults before command-line flags
    """
    environ = os.environ if environ is None else environ
    defaults = Defaults()
    if config_path:
        defaults = read_ini(config_path, defaults)
    if environ.get(SEED_ENV):
        defaults = replace(defaults, seed=parse_seed(environ[SEED_ENV]))
        logger.debug(f"Default seed {defaults.seed} taken from {SEED_ENV}")
    return defaults
