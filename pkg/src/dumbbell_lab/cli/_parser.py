"""CLI argument parser and main entrypoint."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from dumbbell_lab.config.models import TierName
from dumbbell_lab.runners.tasks import TASK_NAMES
from dumbbell_lab.utils.logging import get_logger

from .commands import cmd_task

logger = get_logger(__name__)

TASK_HELP = {
    "cross-section": "Cross-section eigendata and half-sphere angular checks",
    "spectra": "Dumbbell eigenpairs along the eps ladder and the limit spectra",
    "frequency": "Frequency profiles, walk bounds and constant-frequency oracles",
    "profiles": "Junction profiles, Kelvin identity and the trace Poincare constant",
    "blowup": "Blow-up rescalings, H_U asymptotics, beta and envelope bounds",
    "identities": "Pohozaev identities, frequency derivatives and refinement rates",
    "full-report": "Every task above, in dependency order",
}


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="Path to the YAML config (default: dumbbell.config.yaml)")
    parser.add_argument("--eps", type=str, help="Override the eps ladder: one value or a comma-separated list")
    parser.add_argument(
        "--tier",
        type=str,
        choices=[t.value for t in TierName],
        help="Mesh resolution tier",
    )
    parser.add_argument("--out", type=Path, help="Output directory for CSVs, summaries and run records")
    parser.add_argument(
        "--serial",
        action="store_true",
        help="Pin run id and timestamps so repeated runs write byte-identical outputs",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dumbbell-lab",
        description="Numerical lab for eigenfunction singularities on dumbbell domains",
    )
    subparsers = parser.add_subparsers(dest="command", help="Available tasks")
    for name in TASK_NAMES:
        task_parser = subparsers.add_parser(name, help=TASK_HELP.get(name, name))
        _add_common_flags(task_parser)
        task_parser.set_defaults(func=cmd_task)
    return parser


def main(argv: Optional[List[str]] = None) -> None:
    """Main CLI entrypoint; exits with 0 (pass), 1 (check failure) or 2 (configuration/assumption failure)."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return

    try:
        code = args.func(args)
    except Exception as e:
        logger.error("Error running command '%s': %s", args.command, e, exc_info=True)
        raise
    sys.exit(code)


if __name__ == "__main__":
    main()
