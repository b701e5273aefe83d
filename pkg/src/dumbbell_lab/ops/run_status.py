"""Run status evaluation for exit codes."""

from typing import List, Optional, Sequence, Tuple

from dumbbell_lab.errors import AssumptionViolation, ConfigurationError
from dumbbell_lab.ops.claims import ClaimCheck

MAX_MESSAGES = 3


def evaluate_run_status(
    checks: Optional[Sequence[ClaimCheck]] = None,
    failure: Optional[BaseException] = None,
) -> Tuple[int, List[str]]:
    """
    Evaluate run status and return exit code with messages.

    Args:
        checks: Claim checks collected by the tasks that ran
        failure: Exception that aborted the run, if any

    Returns:
        Tuple of (exit_code, messages)
        - exit_code: 0=all claims pass, 1=a claim failed, 2=configuration/assumption failure
        - messages: status lines (top 1-3 for display)
    """
    messages: List[str] = []
    checks = list(checks or [])

    # configuration or assumption failures abort the run before claims mean anything
    if isinstance(failure, ConfigurationError):
        messages.append(f"Configuration error: {failure}")
        return (2, messages)
    if isinstance(failure, AssumptionViolation):
        messages.append(f"Assumption violated: {failure}")
        return (2, messages)

    failed = [c for c in checks if not c.passed]
    if failure is not None:
        messages.append(f"Task failed: {type(failure).__name__}: {failure}")
        for check in failed[: MAX_MESSAGES - 1]:
            messages.append(f"Claim failed: {check.claim_id} measured={check.measured} expected {check.expected}")
        return (1, messages)

    if failed:
        for check in failed[:MAX_MESSAGES]:
            messages.append(f"Claim failed: {check.claim_id} measured={check.measured} expected {check.expected}")
        if len(failed) > MAX_MESSAGES:
            messages.append(f"... and {len(failed) - MAX_MESSAGES} more failed claims")
        return (1, messages)

    if not checks:
        messages.append("No claims checked")
        return (0, messages)

    messages.append(f"All {len(checks)} claims pass")
    return (0, messages)


__all__ = ["evaluate_run_status"]
