"""Task runners behind the command-line interface."""

from dumbbell_lab.runners.report import RunOutcome, run
from dumbbell_lab.runners.tasks import TASK_NAMES

__all__ = ["RunOutcome", "TASK_NAMES", "run"]
