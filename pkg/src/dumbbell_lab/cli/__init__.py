"""CLI package for the dumbbell lab.

Re-exports the entry point and the names tests monkeypatch.
"""

# Entry point
from dumbbell_lab.cli._parser import build_parser, main

# Command handlers
from dumbbell_lab.cli.commands import cmd_task

# Helpers
from dumbbell_lab.cli._helpers import _load_effective_config, _parse_eps, logger

__all__ = ["build_parser", "cmd_task", "main"]
