"""Task command: load the effective config, run one task, report the status."""

import argparse

from dumbbell_lab.errors import ConfigurationError
from dumbbell_lab.runners.report import run
from dumbbell_lab.utils.logging import get_logger

from ._helpers import _load_effective_config, _print_status, _report_config_failure

logger = get_logger(__name__)


def cmd_task(args: argparse.Namespace) -> int:
    """Run the task named by ``args.command`` and return its exit code."""
    try:
        config = _load_effective_config(args)
    except (ConfigurationError, FileNotFoundError) as exc:
        _report_config_failure(exc)
        _print_status(2, [str(exc)])
        return 2
    outcome = run(config, args.command)
    _print_status(outcome.exit_code, outcome.messages)
    print(f"Outputs written to {config.output_dir}")
    return outcome.exit_code
