"""Shared helpers for CLI commands."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from dumbbell_lab.config.loader import DEFAULT_CONFIG_PATH, apply_overrides, load_config, parse_config
from dumbbell_lab.config.models import ExperimentConfig
from dumbbell_lab.errors import ConfigurationError
from dumbbell_lab.utils.logging import get_logger

logger = get_logger(__name__)

STATUS_NAMES = {0: "PASS", 1: "CHECK FAILURE", 2: "CONFIGURATION/ASSUMPTION FAILURE"}


def _parse_eps(text: Optional[str]) -> Optional[List[float]]:
    """Parse ``--eps 0.1`` or ``--eps 0.2,0.1,0.05`` into a list of floats."""
    if text is None:
        return None
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"--eps expects comma-separated numbers, got {text!r}") from exc
    if not values:
        raise ConfigurationError("--eps is empty")
    return values


def _load_effective_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Load the config file (explicit path, else the default file if present, else
    built-in defaults) and apply the CLI overrides.
    """
    path: Optional[Path] = getattr(args, "config", None)
    if path is not None:
        config = load_config(path)
    elif DEFAULT_CONFIG_PATH.exists():
        config = load_config(DEFAULT_CONFIG_PATH)
    else:
        logger.info("No %s found; using built-in defaults", DEFAULT_CONFIG_PATH)
        config = parse_config({})
    return apply_overrides(
        config,
        eps=_parse_eps(getattr(args, "eps", None)),
        tier=getattr(args, "tier", None),
        out=getattr(args, "out", None),
        serial=True if getattr(args, "serial", False) else None,
    )


def _print_status(exit_code: int, messages: List[str]) -> None:
    print(f"\n{'=' * 50}")
    print(f"Run status: {STATUS_NAMES.get(exit_code, 'UNKNOWN')}")
    if messages:
        print("\nTop issues:" if exit_code else "\nSummary:")
        for msg in messages[:3]:
            print(f"  - {msg}")
    print(f"{'=' * 50}\n")


def _report_config_failure(error: Exception) -> None:
    logger.error("Configuration failure: %s", error, exc_info=True)
    print(f"[dumbbell-lab] configuration error: {error}", file=sys.stderr)
